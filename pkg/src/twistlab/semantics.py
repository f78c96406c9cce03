"""Valuations, evaluation and validity over algebras and twist-structures.

Validity is decided by exhausting every valuation of the variables that
occur in the formula.  The scan is vectorised: each subformula is evaluated
on a numpy array of valuations at once, in chunks so that a refuted formula
is abandoned after the first chunk.  Formulas without strong negation are
decided on the base algebra of a twist-structure instead of on its pairs
(the first projection commutes with all positive connectives, which
pi1_commutes verifies exhaustively); the reported witness is identical.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import formula as fm
from .formula import Formula, LanguageTag
from .tba import FiniteTBA
from .twist import TwistStructure

__all__ = [
    "LanguageError", "CapExceededError", "ValidityResult",
    "evaluate", "is_valid", "validity_profile", "models_axioms",
    "enumerate_formulas", "default_corpus", "twtop_check", "TwTopReport",
    "pi1_commutes",
]

DEFAULT_CAP = 10_000_000
_FIRST_CHUNK = 4096


class LanguageError(ValueError):
    """Formula uses a connective the structure cannot interpret."""


class CapExceededError(RuntimeError):
    """Valuation space larger than the configured cap."""


def _resolve_cap(cap):
    if cap is not None:
        return cap
    env = os.environ.get("TWISTLAB_VALUATION_CAP")
    return int(env) if env else DEFAULT_CAP


def _is_twist(structure):
    return isinstance(structure, TwistStructure)


def _prepare(structure, phi):
    """Desugar against the structure's language and check compatibility."""
    if _is_twist(structure):
        target = LanguageTag.Lsbox if structure.modal else LanguageTag.Ls
        modal_ok, sneg_ok = structure.modal, True
    elif isinstance(structure, FiniteTBA):
        target, modal_ok, sneg_ok = LanguageTag.Lbox, True, False
    else:
        target, modal_ok, sneg_ok = LanguageTag.Li, False, False
    psi = _cached_desugar(phi, target)
    lang = fm.language_of(psi)
    if not sneg_ok and lang in (LanguageTag.Ls, LanguageTag.Lsbox):
        raise LanguageError("strong negation needs a twist-structure")
    if not modal_ok and lang in (LanguageTag.Lbox, LanguageTag.Lsbox):
        raise LanguageError("modal connectives need a TBA (or a twist over one)")
    return psi


_desugar_cache: dict = {}


def _cached_desugar(phi, target):
    key = (id(phi), target)
    hit = _desugar_cache.get(key)
    if hit is None:
        hit = fm.desugar(phi, target)
        _desugar_cache[key] = hit
    return hit


# ---------------------------------------------------------------------------
# Vectorised evaluation

_MEMO_HEIGHT = 3


class _Vec:
    """Evaluates formulas over parallel arrays of valuations.

    Twist values are (firsts, seconds) array pairs, algebra values single
    index arrays.  Small subformulas are memoised by identity (formulas are
    interned), which turns a corpus sharing subterms into a DAG sweep.
    """

    def __init__(self, structure, assign, length):
        self.twist = _is_twist(structure)
        self.base = structure.base if self.twist else structure
        self.assign = assign
        self.length = length
        self.memo = {}

    def eval(self, phi):
        if phi.height <= _MEMO_HEIGHT:
            hit = self.memo.get(id(phi))
            if hit is not None:
                return hit
            value = self._compute(phi)
            self.memo[id(phi)] = value
            return value
        return self._compute(phi)

    def _compute(self, phi):
        base = self.base
        kind = phi.kind
        if kind == "var":
            try:
                return self.assign[phi.name]
            except KeyError:
                raise KeyError(f"unbound variable {phi.name!r}") from None
        if self.twist:
            if kind == "bot":
                return (np.full(self.length, base.bot, dtype=np.intp),
                        np.full(self.length, base.top, dtype=np.intp))
            if kind == "sneg":
                f, s = self.eval(phi.args[0])
                return (s, f)
            if kind == "box":
                f, s = self.eval(phi.args[0])
                return (base.box[f], base.dia_table[s])
            if kind == "dia":
                f, s = self.eval(phi.args[0])
                return (base.dia_table[f], base.box[s])
            f1, s1 = self.eval(phi.args[0])
            f2, s2 = self.eval(phi.args[1])
            if kind == "and":
                return (base.meet[f1, f2], base.join[s1, s2])
            if kind == "or":
                return (base.join[f1, f2], base.meet[s1, s2])
            if kind == "imp":
                return (base.imp[f1, f2], base.meet[f1, s2])
            raise LanguageError(f"cannot interpret {kind!r} in a twist")
        if kind == "bot":
            return np.full(self.length, base.bot, dtype=np.intp)
        if kind == "box":
            return base.box[self.eval(phi.args[0])]
        if kind == "dia":
            return base.dia_table[self.eval(phi.args[0])]
        a = self.eval(phi.args[0])
        if kind == "and":
            return base.meet[a, self.eval(phi.args[1])]
        if kind == "or":
            return base.join[a, self.eval(phi.args[1])]
        if kind == "imp":
            return base.imp[a, self.eval(phi.args[1])]
        raise LanguageError(f"cannot interpret {kind!r} in an algebra")


def _var_grid(m, k, lo, hi):
    """Columns of the lexicographic product enumeration, rows lo..hi-1."""
    idx = np.arange(lo, hi, dtype=np.int64)
    cols = []
    for i in range(k):
        stride = m ** (k - 1 - i)
        cols.append((idx // stride) % m)
    return cols


def _chunks(total):
    lo = 0
    step = _FIRST_CHUNK
    while lo < total:
        hi = min(total, lo + step)
        yield lo, hi
        lo = hi
        step = 1 << 20


def _decode_index(index, m, k):
    out = []
    for i in range(k):
        stride = m ** (k - 1 - i)
        out.append((index // stride) % m)
    return out


# ---------------------------------------------------------------------------
# Single-valuation evaluation


def evaluate(structure, phi: Formula, valuation: dict):
    """Homomorphic extension of a valuation; returns an element index or,
    on a twist-structure, a pair of them."""
    psi = _prepare(structure, phi)
    assign = {}
    twist = _is_twist(structure)
    for name in sorted(fm.free_vars(psi)):
        if name not in valuation:
            raise KeyError(f"unbound variable {name!r}")
        value = valuation[name]
        if twist:
            a, b = value
            if (a, b) not in structure:
                raise ValueError(f"pair {value} not in carrier")
            assign[name] = (np.array([a], dtype=np.intp),
                            np.array([b], dtype=np.intp))
        else:
            value = int(value)
            if not 0 <= value < structure.n:
                raise ValueError(f"element {value} out of range")
            assign[name] = np.array([value], dtype=np.intp)
    ev = _Vec(structure, assign, 1)
    out = ev.eval(psi)
    if twist:
        return (int(out[0][0]), int(out[1][0]))
    return int(out[0])


# ---------------------------------------------------------------------------
# Validity


@dataclass
class ValidityResult:
    valid: bool
    witness: dict | None = None
    value: object = None

    def __bool__(self):
        return self.valid

    def witness_json(self):
        if self.valid:
            return None
        val = {k: (list(v) if isinstance(v, tuple) else v)
               for k, v in self.witness.items()}
        value = list(self.value) if isinstance(self.value, tuple) else self.value
        return {"valuation": val, "value": value}


def _positive(phi):
    if phi.kind == "sneg":
        return False
    if phi.kind == "var":
        return True
    return all(_positive(a) for a in phi.args)


def _scan(structure, psi, names, lo, hi, m):
    """Evaluate psi on grid rows lo..hi-1; return (all_ok, first_bad|None)."""
    twist = _is_twist(structure)
    cols = _var_grid(m, len(names), lo, hi)
    if twist:
        f, s = structure.firsts, structure.seconds
        assign = {name: (f[col], s[col]) for name, col in zip(names, cols)}
        top = structure.base.top
    else:
        assign = {name: col.astype(np.intp) for name, col in zip(names, cols)}
        top = structure.top
    ev = _Vec(structure, assign, hi - lo)
    out = ev.eval(psi)
    first = out[0] if twist else out
    ok = first == top
    if ok.all():
        return True, None
    return False, lo + int(np.argmin(ok))


def _scan_job(args):
    structure, psi, names, lo, hi, m = args
    for clo in range(lo, hi, 1 << 20):
        chi = min(hi, clo + (1 << 20))
        valid, bad = _scan(structure, psi, names, clo, chi, m)
        if not valid:
            return bad
    return None


def is_valid(structure, phi: Formula, cap: int | None = None,
             jobs: int = 1, reduce_positive: bool = True) -> ValidityResult:
    """Exhaustive validity over all valuations of the variables in phi.

    Valuations are ordered lexicographically (variables sorted by name,
    values by element index, pairs by carrier position); a refutation
    reports the least witness.  The valuation-space size is guarded by
    ``cap`` (default from TWISTLAB_VALUATION_CAP or 10**7).
    """
    psi = _prepare(structure, phi)
    names = sorted(fm.free_vars(psi))
    k = len(names)
    twist = _is_twist(structure)

    reduced = twist and reduce_positive and _positive(psi)
    scan_on = structure.base if reduced else structure
    m = scan_on.n if not _is_twist(scan_on) else scan_on.size
    total = m ** k
    cap = _resolve_cap(cap)
    if total > cap:
        raise CapExceededError(
            f"valuation space {m}^{k} exceeds cap {cap}; raise "
            f"TWISTLAB_VALUATION_CAP to override")

    bad = None
    if jobs > 1 and total > _FIRST_CHUNK:
        from concurrent.futures import ProcessPoolExecutor
        bounds = np.linspace(0, total, jobs + 1, dtype=np.int64)
        tasks = [(scan_on, psi, names, int(lo), int(hi), m)
                 for lo, hi in zip(bounds, bounds[1:]) if lo < hi]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            hits = [h for h in pool.map(_scan_job, tasks) if h is not None]
        bad = min(hits) if hits else None
    else:
        for lo, hi in _chunks(total):
            valid, bad = _scan(scan_on, psi, names, lo, hi, m)
            if not valid:
                break

    if bad is None:
        return ValidityResult(True)
    positions = _decode_index(bad, m, k)
    if reduced:
        # map base elements to their first carrier pair; the carrier is
        # sorted by first component, so this preserves least-witness order
        firsts = structure.firsts
        pair_pos = [int(np.searchsorted(firsts, e)) for e in positions]
        witness = {name: (int(structure.firsts[i]), int(structure.seconds[i]))
                   for name, i in zip(names, pair_pos)}
    elif twist:
        witness = {name: (int(structure.firsts[i]), int(structure.seconds[i]))
                   for name, i in zip(names, positions)}
    else:
        witness = {name: int(i) for name, i in zip(names, positions)}
    value = evaluate(structure, psi, witness)
    return ValidityResult(False, witness, value)


def validity_profile(structure, formulas, cap: int | None = None,
                     reduce_positive: bool = True) -> list:
    """Validity booleans for a batch of formulas sharing one grid.

    Much faster than mapping is_valid when the formulas share subterms:
    each chunk of the valuation space is evaluated once per distinct
    subformula, and formulas refuted early drop out of later chunks.
    """
    psis = [_prepare(structure, phi) for phi in formulas]
    twist = _is_twist(structure)
    cap = _resolve_cap(cap)
    out = [True] * len(psis)

    groups: dict = {}
    for i, psi in enumerate(psis):
        reduced = twist and reduce_positive and _positive(psi)
        key = (reduced, tuple(sorted(fm.free_vars(psi))))
        groups.setdefault(key, []).append(i)

    for (reduced, names), members in groups.items():
        scan_on = structure.base if reduced else structure
        m = scan_on.n if not _is_twist(scan_on) else scan_on.size
        total = m ** len(names)
        if total > cap:
            raise CapExceededError(
                f"valuation space {m}^{len(names)} exceeds cap {cap}")
        pending = list(members)
        for lo, hi in _chunks(total):
            cols = _var_grid(m, len(names), lo, hi)
            if _is_twist(scan_on):
                f, s = scan_on.firsts, scan_on.seconds
                assign = {nm: (f[c], s[c]) for nm, c in zip(names, cols)}
                top = scan_on.base.top
            else:
                assign = {nm: c.astype(np.intp) for nm, c in zip(names, cols)}
                top = scan_on.top
            ev = _Vec(scan_on, assign, hi - lo)
            still = []
            for i in pending:
                value = ev.eval(psis[i])
                first = value[0] if _is_twist(scan_on) else value
                if (first == top).all():
                    still.append(i)
                else:
                    out[i] = False
            pending = still
            if not pending:
                break
    return out


def models_axioms(structure, name: str):
    """Check a named axiom set; returns (all_valid, first_failing)."""
    for phi in fm.axioms(name):
        if not is_valid(structure, phi).valid:
            return False, phi
    return True, None


# ---------------------------------------------------------------------------
# Formula corpora

_VAR_NAMES = "pqrstuvw"

_UNARY = {
    LanguageTag.Li: (),
    LanguageTag.Ls: (fm.SNeg,),
    LanguageTag.Lbox: (fm.Box,),
    LanguageTag.Lsbox: (fm.SNeg, fm.Box, fm.Dia),
}


def enumerate_formulas(language, depth: int, nvars: int, budget: int) -> list:
    """All formulas of the language with tree height at most ``depth`` over
    the first ``nvars`` variables, in a fixed deterministic order (by
    height; unary applications before binary; connectives in a fixed
    order), truncated to ``budget``."""
    if isinstance(language, str):
        language = LanguageTag(language)
    if nvars > len(_VAR_NAMES):
        raise ValueError(f"at most {len(_VAR_NAMES)} variables supported")
    unary = _UNARY[language]
    binary = (fm.And, fm.Or, fm.Imp)
    atoms = [fm.Var(_VAR_NAMES[i]) for i in range(nvars)] + [fm.Bot]
    out = list(atoms[:budget])
    prev_new, everything = list(atoms), list(atoms)
    for _ in range(depth):
        if len(out) >= budget:
            break
        fresh = []
        for op in unary:
            for arg in prev_new:
                fresh.append(op(arg))
        cutoff = len(everything) - len(prev_new)
        for op in binary:
            for i, lhs in enumerate(everything):
                for j, rhs in enumerate(everything):
                    if i >= cutoff or j >= cutoff:
                        fresh.append(op(lhs, rhs))
        for phi in fresh:
            if len(out) >= budget:
                break
            out.append(phi)
        everything = everything + fresh
        prev_new = fresh
    return out[:budget]


def default_corpus(budget: int = 2000) -> list:
    """Corpus used by the translation-equivalence checks: the Nelson axiom
    schemes, the two Kleene axioms and the closed-ideal axiom, then an
    enumerated sample of two-variable formulas."""
    corpus = list(fm.axioms("N4BOT"))
    corpus += [fm.KLEENE_AXIOM, fm.KLEENE_PRIME_AXIOM, fm.CLOSED_IDEAL_AXIOM]
    corpus += enumerate_formulas(LanguageTag.Ls, 2, 2, budget)
    return corpus


# ---------------------------------------------------------------------------
# The translation equivalence report


@dataclass
class TwTopReport:
    grz_holds: bool
    lambda_is_opens: bool
    rows: list  # (formula, open_pairs_valid | None, translated_valid)

    @property
    def hypotheses_hold(self) -> bool:
        return self.grz_holds and self.lambda_is_opens

    @property
    def mismatches(self) -> list:
        return [row for row in self.rows
                if row[1] is not None and row[1] != row[2]]

    def to_json(self):
        return {
            "grz_holds": self.grz_holds,
            "lambda_is_opens": self.lambda_is_opens,
            "rows": [
                {"formula": fm.pretty(phi), "open_pairs": lhs,
                 "translated": rhs}
                for phi, lhs, rhs in self.rows
            ],
            "mismatches": len(self.mismatches),
        }


def twtop_check(structure: TwistStructure, formulas,
                cap: int | None = None) -> TwTopReport:
    """For each formula, compare validity in the algebra of open pairs with
    validity of its strong-negation translation in the twist itself.

    When the base satisfies the Grzegorczyk axiom and the opens all lie in
    the relevant lambda set, the two sides must agree; otherwise the pairs
    are reported as observations only.
    """
    from . import openpairs, tba

    if not structure.modal:
        raise LanguageError("twtop_check needs a twist over a TBA")
    base = structure.base
    grz_holds = tba.satisfies_grz(base)[0]
    lam = openpairs.lambda_set(base, structure.nabla)
    lambda_is_opens = lam == tba.open_elements(base)

    gamma = openpairs.gamma(structure)
    open_side = None
    if gamma == lam:
        open_side = openpairs.open_pairs_algebra(structure)

    translated = [fm.belnap_translate(fm.desugar(phi)) for phi in formulas]
    rhs = validity_profile(structure, translated, cap=cap)
    if open_side is not None:
        lhs = validity_profile(open_side, list(formulas), cap=cap)
    else:
        lhs = [None] * len(formulas)
    rows = list(zip(formulas, lhs, rhs))
    report = TwTopReport(grz_holds, lambda_is_opens, rows)
    if report.hypotheses_hold and report.mismatches:
        raise AssertionError(
            "translation equivalence failed although its hypotheses hold")
    return report


def pi1_commutes(structure: TwistStructure, psi: Formula,
                 cap: int | None = None) -> bool:
    """Exhaustively confirm that the first projection of a positive
    formula's value equals the base value of the projected valuation."""
    phi = _prepare(structure, psi)
    if not _positive(phi):
        raise ValueError("pi1_commutes expects a formula without ~")
    names = sorted(fm.free_vars(phi))
    k = len(names)
    m = structure.size
    total = m ** k
    if total > _resolve_cap(cap):
        raise CapExceededError(f"valuation space {m}^{k} exceeds cap")
    for lo, hi in _chunks(total):
        cols = _var_grid(m, k, lo, hi)
        f, s = structure.firsts, structure.seconds
        assign = {nm: (f[c], s[c]) for nm, c in zip(names, cols)}
        twist_val = _Vec(structure, assign, hi - lo).eval(phi)[0]
        base_assign = {nm: f[c] for nm, c in zip(names, cols)}
        base_val = _Vec(structure.base, base_assign, hi - lo).eval(phi)
        if not np.array_equal(twist_val, base_val):
            return False
    return True
