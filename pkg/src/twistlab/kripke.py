"""Kripke frames over finite posets, with exhaustive frame validity.

A model assigns each variable a set of worlds; implication is classical at
each world and box quantifies over the up-set.  Frame validity scans every
valuation, vectorised as one bitmask-over-worlds per valuation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import formula as fm
from .formula import Formula, LanguageTag
from .order import FinitePoset, enumerate_posets, poset_to_json
from .semantics import CapExceededError, LanguageError, _resolve_cap

__all__ = [
    "KripkeModel", "forces", "FrameResult", "frame_valid",
    "frame_validity_profile", "grz_refutation_search", "lemma_323_formula",
    "lemma_323_premise_vacuous",
]


@dataclass
class KripkeModel:
    frame: FinitePoset
    valuation: dict  # var name -> frozenset of worlds

    def world_mask(self, name) -> int:
        mask = 0
        for w in self.valuation.get(name, ()):
            mask |= 1 << w
        return mask

    def to_json(self):
        return {
            "frame": poset_to_json(self.frame),
            "valuation": {name: sorted(worlds)
                          for name, worlds in self.valuation.items()},
        }


def _modal_core(phi):
    psi = fm.desugar(phi, LanguageTag.Lbox)
    if fm.language_of(psi) not in (LanguageTag.Li, LanguageTag.Lbox):
        raise LanguageError("Kripke semantics covers the box language only")
    return psi


def forces(model: KripkeModel, world: int, phi: Formula) -> bool:
    """Truth at one world, by the standard clauses."""
    psi = _modal_core(phi)
    frame = model.frame

    def walk(f, x):
        kind = f.kind
        if kind == "var":
            return bool(model.world_mask(f.name) >> x & 1)
        if kind == "bot":
            return False
        if kind == "and":
            return walk(f.args[0], x) and walk(f.args[1], x)
        if kind == "or":
            return walk(f.args[0], x) or walk(f.args[1], x)
        if kind == "imp":
            return (not walk(f.args[0], x)) or walk(f.args[1], x)
        if kind == "box":
            mask = frame.up[x]
            y = 0
            while mask:
                if mask & 1 and not walk(f.args[0], y):
                    return False
                mask >>= 1
                y += 1
            return True
        raise LanguageError(f"cannot interpret {kind!r} in a frame")

    return walk(psi, world)


class _FrameVec:
    """Evaluates a formula as truth bitmasks over all valuations at once."""

    def __init__(self, frame, assign):
        self.frame = frame
        self.full = (1 << frame.n) - 1
        self.assign = assign
        self.memo = {}

    def eval(self, phi):
        hit = self.memo.get(id(phi))
        if hit is None:
            hit = self._compute(phi)
            self.memo[id(phi)] = hit
        return hit

    def _compute(self, phi):
        kind = phi.kind
        if kind == "var":
            return self.assign[phi.name]
        if kind == "bot":
            return np.zeros_like(next(iter(self.assign.values()))) \
                if self.assign else np.zeros(1, dtype=np.int64)
        if kind == "and":
            return self.eval(phi.args[0]) & self.eval(phi.args[1])
        if kind == "or":
            return self.eval(phi.args[0]) | self.eval(phi.args[1])
        if kind == "imp":
            return (~self.eval(phi.args[0]) | self.eval(phi.args[1])) \
                & self.full
        if kind == "box":
            inner = self.eval(phi.args[0])
            out = np.zeros_like(inner)
            for x in range(self.frame.n):
                up = self.frame.up[x]
                out |= ((inner & up) == up).astype(np.int64) << x
            return out
        raise LanguageError(f"cannot interpret {kind!r} in a frame")


@dataclass
class FrameResult:
    valid: bool
    model: KripkeModel | None = None
    world: int | None = None

    def __bool__(self):
        return self.valid

    def to_json(self):
        if self.valid:
            return {"valid": True}
        out = self.model.to_json()
        out["world"] = self.world
        return out


def frame_valid(frame: FinitePoset, phi: Formula,
                cap: int | None = None) -> FrameResult:
    """Validity over every model on the frame; refutations report the
    least valuation (variables sorted, subsets by bitmask) and world."""
    psi = _modal_core(phi)
    names = sorted(fm.free_vars(psi))
    n, k = frame.n, len(names)
    total = 1 << (n * k)
    if total > _resolve_cap(cap):
        raise CapExceededError(
            f"valuation space 2^({n}*{k}) exceeds the configured cap")
    full = (1 << n) - 1
    idx = np.arange(total, dtype=np.int64)
    assign = {}
    for i, name in enumerate(names):
        shift = n * (k - 1 - i)
        assign[name] = (idx >> shift) & full
    ev = _FrameVec(frame, assign)
    out = ev.eval(psi)
    bad = np.flatnonzero(out != full)
    if not len(bad):
        return FrameResult(True)
    index = int(bad[0])
    truth = int(out[index])
    world = ((truth ^ full) & -(truth ^ full)).bit_length() - 1
    valuation = {}
    for i, name in enumerate(names):
        shift = n * (k - 1 - i)
        mask = (index >> shift) & full
        valuation[name] = frozenset(w for w in range(n) if mask >> w & 1)
    return FrameResult(False, KripkeModel(frame, valuation), world)


def frame_validity_profile(frame: FinitePoset, formulas,
                           cap: int | None = None) -> list:
    """Validity booleans for a batch of formulas on one frame, sharing the
    valuation grid and subformula evaluations."""
    psis = [_modal_core(phi) for phi in formulas]
    names = sorted(set().union(*(fm.free_vars(psi) for psi in psis))
                   if psis else ())
    n, k = frame.n, len(names)
    total = 1 << (n * k)
    if total > _resolve_cap(cap):
        raise CapExceededError(
            f"valuation space 2^({n}*{k}) exceeds the configured cap")
    full = (1 << n) - 1
    idx = np.arange(total, dtype=np.int64)
    assign = {name: (idx >> (n * (k - 1 - i))) & full
              for i, name in enumerate(names)}
    ev = _FrameVec(frame, assign)
    return [bool((ev.eval(psi) == full).all()) for psi in psis]


def grz_refutation_search(phi: Formula, max_worlds: int,
                          cap: int | None = None) -> FrameResult | None:
    """Scan all labeled posets up to the size bound, smallest first and
    within a size by relation mask, for a refuting model.

    None means no refutation within the bound: evidence, not proof.
    """
    for frame in enumerate_posets(max_worlds):
        result = frame_valid(frame, phi, cap=cap)
        if not result.valid:
            return result
    return None


_p, _q = fm.Var("p"), fm.Var("q")

_LEMMA_323 = fm.Imp(
    fm.And(fm.Box(fm.Or(_p, _q)),
           fm.And(fm.Or(fm.Box(_p), fm.Box(fm.Dia(fm.Neg(_p)))),
                  fm.Or(fm.Box(_q), fm.Box(fm.Dia(fm.Neg(_q)))))),
    fm.Or(fm.Box(_p), fm.Box(_q)))


def lemma_323_formula() -> Formula:
    """A disjunction-splitting law of the Grzegorczyk logic: if p v q holds
    hereditarily and each disjunct is either boxed or hereditarily
    refutable somewhere above, then one disjunct is boxed."""
    return _LEMMA_323


_STRONG_PREMISE = fm.And(
    fm.Box(fm.Or(_p, _q)),
    fm.And(fm.Box(fm.Dia(fm.Neg(_p))), fm.Box(fm.Dia(fm.Neg(_q)))))


def lemma_323_premise_vacuous(frame: FinitePoset,
                              cap: int | None = None) -> bool:
    """The maximal-world argument behind lemma_323_formula, transcribed.

    On a finite frame no world can force box(p v q) together with
    box dia not-p and box dia not-q: a maximal world above it would have
    to refute both disjuncts while forcing their disjunction.  Returns
    True when (a) no model/world forces the conjunction and (b) at every
    maximal world, dia phi and phi agree for the relevant refutands.
    """
    psi = _modal_core(_STRONG_PREMISE)
    names = sorted(fm.free_vars(psi))
    n, k = frame.n, len(names)
    total = 1 << (n * k)
    if total > _resolve_cap(cap):
        raise CapExceededError("valuation space exceeds the configured cap")
    full = (1 << n) - 1
    idx = np.arange(total, dtype=np.int64)
    assign = {name: (idx >> (n * (k - 1 - i))) & full
              for i, name in enumerate(names)}
    ev = _FrameVec(frame, assign)
    if ev.eval(psi).any():
        return False
    maximal = frame.maximal_mask()
    for atom in (_p, _q):
        plain = ev.eval(_modal_core(fm.Neg(atom)))
        somewhere = ev.eval(_modal_core(fm.Dia(fm.Neg(atom))))
        if ((plain ^ somewhere) & maximal).any():
            return False
    return True
