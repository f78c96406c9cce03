"""Command-line surface: validation, model checking, translations, the
companion pipeline, refutation search, and enumeration.

Exit codes follow one contract everywhere: 0 for a positive outcome,
1 for a definite negative finding (violation, refutation), 2 for usage,
parse or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from . import formula as fm
from . import semantics
from .companions import companion_structure, kleene_demo
from .heyting import FiniteHeytingAlgebra, heyting_from_json, heyting_to_json
from .kripke import grz_refutation_search
from .order import FinitePoset, enumerate_posets, poset_from_json, \
    poset_to_json, heyting_from_poset, validate_poset
from .tba import tba_from_json
from .twist import tw

USAGE_ERROR = 2


def _emit(args, payload, text_lines):
    """JSON output carries the version and a config echo; text output a
    version header."""
    if args.format == "json":
        wrapped = {
            "tool": "twistlab",
            "version": __version__,
            "config": {key: value for key, value in vars(args).items()
                       if key not in ("func",)},
            "result": payload,
        }
        print(json.dumps(wrapped, sort_keys=True))
    else:
        print(f"# twistlab {__version__}")
        for line in text_lines:
            print(line)


def _load_json(path):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _structure_from_data(data, base_dir="."):
    kind = data.get("type")
    if kind == "poset":
        return poset_from_json(data)
    if kind == "heyting":
        return heyting_from_json(data)
    if kind == "tba":
        return tba_from_json(data)
    if kind == "twist":
        base = data["base"]
        if isinstance(base, str):
            base_path = os.path.join(base_dir, base)
            base = _load_json(base_path)
        algebra = _structure_from_data(base, base_dir)
        if isinstance(algebra, FinitePoset):
            raise ValueError("a twist base must be an algebra, not a poset")
        algebra.check()
        return tw(algebra, frozenset(data["nabla"]), frozenset(data["delta"]))
    raise ValueError(f"unknown structure type {kind!r}")


def load_structure(path):
    data = _load_json(path)
    return _structure_from_data(data, os.path.dirname(path) or "."), data


def cmd_validate(args):
    try:
        data = _load_json(args.path)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        kind = data.get("type")
        if kind == "poset":
            report = validate_poset(poset_from_json(data))
        elif kind == "heyting":
            report = heyting_from_json(data).validate()
        elif kind == "tba":
            report = tba_from_json(data).validate()
        elif kind == "twist":
            try:
                _structure_from_data(data, os.path.dirname(args.path) or ".")
                report = None
            except ValueError as exc:
                report = str(exc)
        else:
            raise ValueError(f"unknown structure type {kind!r}")
    except (KeyError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    ok = report is None
    _emit(args, {"ok": ok, "report": report},
          ["ok" if ok else f"violation: {report}"])
    return 0 if ok else 1


def cmd_check(args):
    try:
        structure, data = load_structure(args.path)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if isinstance(structure, FinitePoset):
        print("error: check needs an algebra or twist, not a poset",
              file=sys.stderr)
        return 2
    if isinstance(structure, FiniteHeytingAlgebra):
        report = structure.validate()
        if report is not None:
            print(f"error: invalid structure: {report}", file=sys.stderr)
            return 2
    texts = [args.formula] if args.formula else list(data.get("formulas", []))
    if not texts:
        print("error: no formula given and none in the file", file=sys.stderr)
        return 2
    results = []
    try:
        for text in texts:
            phi = fm.parse(text)
            outcome = semantics.is_valid(structure, phi, jobs=args.jobs)
            results.append((text, outcome))
    except (fm.ParseError, semantics.LanguageError,
            semantics.CapExceededError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = []
    lines = []
    refuted = False
    for text, outcome in results:
        row = {"formula": text, "valid": outcome.valid}
        if outcome.valid:
            lines.append(f"valid: {text}")
        else:
            refuted = True
            row["witness"] = outcome.witness_json()
            lines.append(f"refuted: {text} "
                         f"witness={json.dumps(outcome.witness_json(), sort_keys=True)}")
        payload.append(row)
    _emit(args, payload, lines)
    return 1 if refuted else 0


def cmd_translate(args):
    try:
        phi = fm.parse(args.formula)
        core = fm.desugar(phi)
        if args.tb:
            out = fm.belnap_translate(core)
        else:
            out = fm.godel_tarski(core)
    except (fm.ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rendered = fm.pretty(out)
    _emit(args, {"input": args.formula, "output": rendered}, [rendered])
    return 0


def cmd_companion(args):
    try:
        data = _load_json(args.path)
        algebra = heyting_from_json(data)
        algebra.check()
        nabla = frozenset(int(x) for x in args.nabla.split(","))
        delta = frozenset(int(x) for x in args.delta.split(","))
        instance = companion_structure(algebra, nabla, delta)
        corpus = None
        if args.corpus:
            raw = _load_json(args.corpus)
            texts = raw["formulas"] if isinstance(raw, dict) else raw
            corpus = [fm.parse(text) for text in texts]
        report = instance.twtop(corpus)
    except (OSError, json.JSONDecodeError, KeyError, ValueError,
            fm.ParseError, semantics.CapExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    mismatches = len(report.mismatches)
    payload = {"instance": instance.to_json(), "twtop": report.to_json()}
    lines = [
        f"pipeline instance: {instance.to_json()}",
        f"hypotheses hold: {report.hypotheses_hold}",
        f"corpus size: {len(report.rows)}; mismatches: {mismatches}",
    ]
    _emit(args, payload, lines)
    return 0 if mismatches == 0 else 1


def cmd_grz_search(args):
    try:
        phi = fm.parse(args.formula)
        hit = grz_refutation_search(phi, args.max_worlds)
    except (fm.ParseError, semantics.LanguageError,
            semantics.CapExceededError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if hit is None:
        _emit(args, {"refuted": False, "max_worlds": args.max_worlds},
              [f"no refutation on posets with <= {args.max_worlds} worlds "
               f"(bounded evidence, not a proof)"])
        return 0
    _emit(args, {"refuted": True, **hit.to_json()},
          [f"refuted: {json.dumps(hit.to_json(), sort_keys=True)}"])
    return 1


def cmd_kleene_demo(args):
    report = kleene_demo()
    _emit(args, report.to_json(), report.transcript)
    return 0


def cmd_enumerate(args):
    if args.type == "poset":
        items = [poset_to_json(p)
                 for p in enumerate_posets(args.max_size, dedup=args.dedup)]
    elif args.type == "heyting":
        items = [heyting_to_json(heyting_from_poset(p))
                 for p in enumerate_posets(args.max_size, dedup=args.dedup)]
    else:
        print(f"error: unknown type {args.type!r}", file=sys.stderr)
        return 2
    lines = [json.dumps(item, sort_keys=True) for item in items]
    _emit(args, items, lines + [f"count: {len(items)}"])
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="twistlab",
        description="Finite twist-structure and modal-translation workbench")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a structure file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("check", help="check a formula in a structure")
    p.add_argument("path")
    p.add_argument("formula", nargs="?",
                   help="formula text; defaults to the file's formulas")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("translate", help="apply a modal translation")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--gt", action="store_true",
                       help="boxed embedding of an intuitionistic formula")
    group.add_argument("--tb", action="store_true",
                       help="strong-negation-aware boxed embedding")
    p.add_argument("formula")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("companion",
                       help="run the companion pipeline on an algebra file")
    p.add_argument("path")
    p.add_argument("--nabla", required=True,
                   help="comma-separated element indices")
    p.add_argument("--delta", required=True,
                   help="comma-separated element indices")
    p.add_argument("--corpus", help="JSON file with formula strings")
    p.set_defaults(func=cmd_companion)

    p = sub.add_parser("grz-search",
                       help="search finite posets for a refuting model")
    p.add_argument("formula")
    p.add_argument("--max-worlds", type=int, default=5)
    p.set_defaults(func=cmd_grz_search)

    p = sub.add_parser("kleene-demo",
                       help="run the no-companion demonstration")
    p.set_defaults(func=cmd_kleene_demo)

    p = sub.add_parser("enumerate", help="enumerate small structures")
    p.add_argument("--type", required=True, choices=("poset", "heyting"))
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--dedup", action="store_true",
                   help="one representative per isomorphism class")
    p.set_defaults(func=cmd_enumerate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
