"""Extracting a Heyting-based twist-structure from a modal one.

For a twist T over a TBA, the pairs whose two components are both open
form a candidate carrier; its first projection (gamma) and the set of
opens a with a v box(not a) in the filter (the lambda set) control when
that candidate really is a twist-structure over a subalgebra of the opens.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .heyting import FiniteHeytingAlgebra
from .tba import open_elements
from .twist import TwistStructure, tw

__all__ = [
    "g2", "gamma", "lambda_set", "nabla_g", "delta_g",
    "gamma_imp_closure_equiv", "open_pairs_algebra", "box_pair_closed",
    "OpenPairsReport", "open_pairs_report",
]


def _require_modal(structure):
    if not structure.modal:
        raise ValueError("this operation needs a twist over a TBA")


def _open_pair_mask(structure):
    base = structure.base
    om = base.open_mask()
    return om[structure.firsts] & om[structure.seconds]


def g2(structure: TwistStructure) -> list:
    """Carrier pairs whose components are both open, in carrier order."""
    _require_modal(structure)
    mask = _open_pair_mask(structure)
    return list(zip(structure.firsts[mask].tolist(),
                    structure.seconds[mask].tolist()))


def gamma(structure: TwistStructure) -> frozenset:
    """First components of the open pairs."""
    _require_modal(structure)
    mask = _open_pair_mask(structure)
    return frozenset(structure.firsts[mask].tolist())


def lambda_set(base, nabla) -> frozenset:
    """Open elements a with a v box(not a) in nabla.

    Verified to be a subalgebra of the open algebra (meet, join, boxed
    implication, bottom).
    """
    nabla = frozenset(nabla)
    opens = sorted(open_elements(base))
    out = [a for a in opens
           if int(base.join[a, base.box[base.neg_table[a]]]) in nabla]
    lam = frozenset(out)
    for a in out:
        for b in out:
            if int(base.meet[a, b]) not in lam:
                raise AssertionError("lambda set not closed under meet")
            if int(base.join[a, b]) not in lam:
                raise AssertionError("lambda set not closed under join")
            if int(base.box[base.imp[a, b]]) not in lam:
                raise AssertionError("lambda set not closed under implication")
    if int(base.bot) not in lam:
        raise AssertionError("lambda set misses bottom")
    return lam


def nabla_g(structure: TwistStructure) -> frozenset:
    """Joins over the open pairs; must coincide with the filter invariant
    restricted to the opens, to gamma, and to the lambda set."""
    _require_modal(structure)
    base = structure.base
    mask = _open_pair_mask(structure)
    joined = base.join[structure.firsts[mask], structure.seconds[mask]]
    by_def = frozenset(np.unique(joined).tolist())
    opens = open_elements(base)
    by_opens = structure.nabla & opens
    by_gamma = structure.nabla & gamma(structure)
    by_lambda = structure.nabla & lambda_set(base, structure.nabla)
    if not (by_def == by_opens == by_gamma == by_lambda):
        raise AssertionError("filter-invariant characterisations disagree")
    return by_def


def delta_g(structure: TwistStructure) -> frozenset:
    """Meets over the open pairs; must coincide with the ideal invariant
    restricted to the opens and to gamma."""
    _require_modal(structure)
    base = structure.base
    mask = _open_pair_mask(structure)
    met = base.meet[structure.firsts[mask], structure.seconds[mask]]
    by_def = frozenset(np.unique(met).tolist())
    by_opens = structure.delta & open_elements(base)
    by_gamma = structure.delta & gamma(structure)
    if not (by_def == by_opens == by_gamma):
        raise AssertionError("ideal-invariant characterisations disagree")
    return by_def


def gamma_imp_closure_equiv(structure: TwistStructure):
    """Two independently computed sides of one equivalence: gamma inside
    the lambda set, and the open pairs being closed under the boxed
    implication."""
    _require_modal(structure)
    base = structure.base
    lhs = gamma(structure) <= lambda_set(base, structure.nabla)

    mask = _open_pair_mask(structure)
    f = structure.firsts[mask]
    s = structure.seconds[mask]
    rf = base.box[base.imp[f[:, None], f[None, :]]]
    rs = base.meet[f[:, None], s[None, :]]
    rhs = bool(structure.member[rf, rs].all())
    return lhs, rhs


def box_pair_closed(structure: TwistStructure) -> bool:
    """Whether applying box to both components keeps every pair inside."""
    _require_modal(structure)
    box = structure.base.box
    return bool(structure.member[box[structure.firsts],
                                 box[structure.seconds]].all())


def open_pairs_algebra(structure: TwistStructure) -> TwistStructure:
    """The open pairs as a twist-structure over the gamma subalgebra.

    Requires gamma to equal the lambda set; refuses otherwise, naming an
    offending element.  The result carries an ``embed`` attribute mapping
    its base indices back into the ambient TBA, and its carrier is checked
    to be exactly the open pairs.
    """
    _require_modal(structure)
    base = structure.base
    gam = gamma(structure)
    lam = lambda_set(base, structure.nabla)
    if gam != lam:
        missing = sorted(gam - lam) or sorted(lam - gam)
        raise ValueError(
            f"open pairs do not form a twist-structure: element "
            f"{missing[0]} separates gamma from the lambda set")

    embed = sorted(gam)
    pos = {b: i for i, b in enumerate(embed)}
    idx = np.asarray(embed, dtype=np.intp)
    meet = np.array([[pos[int(base.meet[a, b])] for b in idx] for a in idx],
                    dtype=np.intp)
    join = np.array([[pos[int(base.join[a, b])] for b in idx] for a in idx],
                    dtype=np.intp)
    imp = np.array(
        [[pos[int(base.box[base.imp[a, b]])] for b in idx] for a in idx],
        dtype=np.intp)
    sub = FiniteHeytingAlgebra(meet, join, imp, bot=pos[base.bot]).check()

    nabla = frozenset(pos[a] for a in nabla_g(structure))
    delta = frozenset(pos[a] for a in delta_g(structure))
    result = tw(sub, nabla, delta)
    expected = {(pos[a], pos[b]) for a, b in g2(structure)}
    if set(zip(result.firsts.tolist(), result.seconds.tolist())) != expected:
        raise AssertionError("open pairs differ from the reconstructed twist")
    result.embed = tuple(embed)
    return result


@dataclass
class OpenPairsReport:
    g2_pairs: list
    gamma: frozenset
    lambda_: frozenset
    nabla_g: frozenset
    delta_g: frozenset
    gamma_eq_lambda: bool
    gamma_sub_lambda: bool
    lambda_sub_gamma: bool
    box_pair_closed: bool
    algebra: TwistStructure | None

    def to_json(self):
        return {
            "g2": [list(p) for p in self.g2_pairs],
            "gamma": sorted(self.gamma),
            "lambda": sorted(self.lambda_),
            "nabla_g": sorted(self.nabla_g),
            "delta_g": sorted(self.delta_g),
            "gamma_eq_lambda": self.gamma_eq_lambda,
            "gamma_sub_lambda": self.gamma_sub_lambda,
            "lambda_sub_gamma": self.lambda_sub_gamma,
            "box_pair_closed": self.box_pair_closed,
        }


def open_pairs_report(structure: TwistStructure) -> OpenPairsReport:
    """Everything the open-pair analysis yields, in one value."""
    _require_modal(structure)
    gam = gamma(structure)
    lam = lambda_set(structure.base, structure.nabla)
    algebra = open_pairs_algebra(structure) if gam == lam else None
    return OpenPairsReport(
        g2_pairs=g2(structure),
        gamma=gam,
        lambda_=lam,
        nabla_g=nabla_g(structure),
        delta_g=delta_g(structure),
        gamma_eq_lambda=gam == lam,
        gamma_sub_lambda=gam <= lam,
        lambda_sub_gamma=lam <= gam,
        box_pair_closed=box_pair_closed(structure),
        algebra=algebra,
    )
