"""Finite topological Boolean algebras: an interior operator on a finite
Boolean algebra, the algebra of open elements, and the lifting maps between
filters/ideals of the two levels.

The canonical construction is the Alexandrov powerset algebra of a poset,
whose opens are the up-sets; every Heyting algebra arises that way from its
join-irreducible poset, which realises ``s_of``.
"""

from __future__ import annotations

import numpy as np

from .heyting import FiniteHeytingAlgebra, is_boolean
from .order import FinitePoset, join_irreducible_poset

__all__ = [
    "FiniteTBA", "validate_tba", "diamond", "open_elements", "open_algebra",
    "powerset_tba", "s_of", "open_filters", "closed_ideals",
    "delta_map", "rho_map", "sigma_map", "satisfies_grz",
    "tba_from_json", "tba_to_json",
]


class FiniteTBA(FiniteHeytingAlgebra):
    """Boolean algebra with an interior table ``box``."""

    def __init__(self, meet, join, imp, bot, box):
        super().__init__(meet, join, imp, bot)
        arr = np.asarray(box, dtype=np.intp)
        if arr.shape != (self.n,):
            raise ValueError(f"box must have length {self.n}")
        if len(arr) and (arr.min() < 0 or arr.max() >= self.n):
            raise ValueError("box entry out of element range")
        arr.setflags(write=False)
        self.box = arr

    @property
    def dia_table(self) -> np.ndarray:
        cached = self._cache.get("dia")
        if cached is None:
            neg_t = self.neg_table
            cached = neg_t[self.box[neg_t]]
            cached.setflags(write=False)
            self._cache["dia"] = cached
        return cached

    def dia(self, a: int) -> int:
        return int(self.dia_table[a])

    def open_mask(self) -> np.ndarray:
        return self.box == np.arange(self.n, dtype=np.intp)

    def validate(self):
        report = super().validate()
        if report is not None:
            return report
        if not is_boolean(self):
            return "underlying algebra is not Boolean"
        box, meet, le = self.box, self.meet, self.le
        if int(box[self.top]) != self.top:
            return "box(top) != top"
        lhs = box[meet]
        rhs = meet[box[:, None], box[None, :]]
        if (lhs != rhs).any():
            a, b = map(int, np.argwhere(lhs != rhs)[0])
            return f"box(meet) law fails at ({a}, {b})"
        rng = np.arange(self.n, dtype=np.intp)
        if not le[box, rng].all():
            a = int(np.flatnonzero(~le[box, rng])[0])
            return f"box({a}) not below {a}"
        if not le[box, box[box]].all():
            a = int(np.flatnonzero(~le[box, box[box]])[0])
            return f"box({a}) not below box(box({a}))"
        return None

    def __eq__(self, other):
        return (isinstance(other, FiniteTBA)
                and super().__eq__(other)
                and np.array_equal(self.box, other.box))

    def __hash__(self):
        return hash((super().__hash__(), self.box.tobytes()))

    def __repr__(self):
        return f"FiniteTBA(n={self.n}, bot={self.bot})"


def validate_tba(algebra: FiniteTBA):
    return algebra.validate()


def diamond(algebra: FiniteTBA, a: int) -> int:
    return algebra.dia(a)


def open_elements(algebra: FiniteTBA) -> frozenset:
    """Fixed points of the interior operator."""
    return frozenset(np.flatnonzero(algebra.open_mask()).tolist())


def open_algebra(algebra: FiniteTBA):
    """The Heyting algebra of open elements, with boxed implication.

    Returns (heyting algebra, embed) where embed[i] is the carrier index in
    the ambient algebra of the i-th open element.
    """
    embed = sorted(open_elements(algebra))
    pos = {b: i for i, b in enumerate(embed)}
    idx = np.asarray(embed, dtype=np.intp)
    meet = np.array([[pos[int(algebra.meet[a, b])] for b in idx] for a in idx],
                    dtype=np.intp)
    join = np.array([[pos[int(algebra.join[a, b])] for b in idx] for a in idx],
                    dtype=np.intp)
    imp = np.array(
        [[pos[int(algebra.box[algebra.imp[a, b]])] for b in idx] for a in idx],
        dtype=np.intp)
    out = FiniteHeytingAlgebra(meet, join, imp, bot=pos[algebra.bot])
    out.check()
    return out, tuple(embed)


def powerset_tba(poset: FinitePoset) -> FiniteTBA:
    """Alexandrov algebra of a poset: all subsets, interior = largest
    contained up-set.  Elements are ordered by (popcount, bitmask)."""
    n = poset.n
    full = (1 << n) - 1
    elems = sorted(range(1 << n), key=lambda s: (bin(s).count("1"), s))
    index = {s: i for i, s in enumerate(elems)}
    size = len(elems)
    meet = np.empty((size, size), dtype=np.intp)
    join = np.empty((size, size), dtype=np.intp)
    imp = np.empty((size, size), dtype=np.intp)
    box = np.empty(size, dtype=np.intp)
    for i, s in enumerate(elems):
        interior = 0
        for x in range(n):
            if poset.up[x] & ~s == 0:
                interior |= 1 << x
        box[i] = index[interior]
        for j, t in enumerate(elems):
            meet[i, j] = index[s & t]
            join[i, j] = index[s | t]
            imp[i, j] = index[(full & ~s) | t]
    return FiniteTBA(meet, join, imp, bot=index[0], box=box)


def s_of(algebra: FiniteHeytingAlgebra):
    """Realise the algebra as the opens of an Alexandrov algebra over its
    join-irreducible poset.

    Returns (tba, iso) where iso[a] is the element of the tba representing
    a; the map is verified to be an isomorphism onto the open algebra, and
    the tba is verified to be generated by its opens.
    """
    jposet = join_irreducible_poset(algebra)
    irr = algebra.join_irreducibles()
    tba = powerset_tba(jposet)
    elems = sorted(range(1 << jposet.n),
                   key=lambda s: (bin(s).count("1"), s))
    index = {s: i for i, s in enumerate(elems)}
    iso = []
    for a in range(algebra.n):
        mask = 0
        for i, j in enumerate(irr):
            if algebra.leq(j, a):
                mask |= 1 << i
        iso.append(index[mask])
    iso = tuple(iso)

    opens = open_elements(tba)
    if len(set(iso)) != algebra.n or set(iso) != opens:
        raise AssertionError("irreducible map is not onto the opens")
    for a in range(algebra.n):
        for b in range(algebra.n):
            if iso[int(algebra.meet[a, b])] != int(tba.meet[iso[a], iso[b]]):
                raise AssertionError("meet not preserved")
            if iso[int(algebra.join[a, b])] != int(tba.join[iso[a], iso[b]]):
                raise AssertionError("join not preserved")
            boxed = int(tba.box[tba.imp[iso[a], iso[b]]])
            if iso[int(algebra.imp[a, b])] != boxed:
                raise AssertionError("implication not preserved")
    if iso[algebra.bot] != tba.bot:
        raise AssertionError("bot not preserved")

    generated = set(opens)
    frontier = True
    while frontier:
        frontier = False
        current = list(generated)
        for a in current:
            for b in current:
                for c in (int(tba.meet[a, b]), int(tba.join[a, b]),
                          int(tba.imp[a, b])):
                    if c not in generated:
                        generated.add(c)
                        frontier = True
    if len(generated) != tba.n:
        raise AssertionError("algebra is not generated by its opens")
    return tba, iso


def open_filters(algebra: FiniteTBA) -> list:
    """Filters closed under box; principal filters of open elements."""
    mask = algebra.open_mask()
    return [algebra.upset(a) for a in range(algebra.n) if mask[a]]


def closed_ideals(algebra: FiniteTBA) -> list:
    """Ideals closed under diamond; principal ideals of diamond-fixed
    elements."""
    dia_t = algebra.dia_table
    return [algebra.downset(a) for a in range(algebra.n)
            if int(dia_t[a]) == a]


def _is_open_filter(algebra, subset):
    subset = frozenset(subset)
    return (algebra.is_filter(subset)
            and all(int(algebra.box[a]) in subset for a in subset))


def _is_closed_ideal_tba(algebra, subset):
    subset = frozenset(subset)
    return (algebra.is_ideal(subset)
            and all(int(algebra.dia_table[a]) in subset for a in subset))


def _is_g_filter(algebra, subset):
    """Filter of the open algebra, given as ambient indices."""
    subset = frozenset(subset)
    opens = open_elements(algebra)
    if not subset or not subset <= opens:
        return False
    for a in subset:
        if any(b not in subset for b in algebra.upset(a) & opens):
            return False
        if any(int(algebra.meet[a, b]) not in subset for b in subset):
            return False
    return True


def _is_g_ideal(algebra, subset):
    subset = frozenset(subset)
    opens = open_elements(algebra)
    if not subset or not subset <= opens:
        return False
    for a in subset:
        if any(b not in subset for b in algebra.downset(a) & opens):
            return False
        if any(int(algebra.join[a, b]) not in subset for b in subset):
            return False
    return True


def delta_map(algebra: FiniteTBA, nabla) -> frozenset:
    """Restrict an open filter to the open elements, giving a filter of the
    open algebra (ambient indices)."""
    nabla = frozenset(nabla)
    if not _is_open_filter(algebra, nabla):
        raise ValueError("delta_map expects an open filter")
    out = nabla & open_elements(algebra)
    assert rho_map(algebra, out) == nabla
    return out


def rho_map(algebra: FiniteTBA, nabla_g) -> frozenset:
    """Lift a filter of the open algebra to the open filter of everything
    whose interior it contains."""
    nabla_g = frozenset(nabla_g)
    if not _is_g_filter(algebra, nabla_g):
        raise ValueError("rho_map expects a filter of the open algebra")
    out = frozenset(a for a in range(algebra.n)
                    if int(algebra.box[a]) in nabla_g)
    assert out & open_elements(algebra) == nabla_g
    return out


def sigma_map(algebra: FiniteTBA, delta) -> frozenset:
    """Least closed ideal containing delta: everything below the diamond of
    a member.  Accepts an ideal of the ambient algebra or of its open
    algebra."""
    delta = frozenset(delta)
    if not (algebra.is_ideal(delta) or _is_g_ideal(algebra, delta)):
        raise ValueError("sigma_map expects an ideal")
    out = set()
    for y in delta:
        d = int(algebra.dia_table[y])
        out.update(np.flatnonzero(algebra.le[:, d]).tolist())
    out = frozenset(out)
    assert _is_closed_ideal_tba(algebra, out)
    return out


def satisfies_grz(algebra: FiniteTBA):
    """Check the Grzegorczyk axiom over all single-element valuations.

    Returns (True, None) or (False, witness element).
    """
    rng = np.arange(algebra.n, dtype=np.intp)
    box, imp = algebra.box, algebra.imp
    inner = box[imp[rng, box]]          # [](p -> []p)
    outer = box[imp[inner, rng]]        # []([](p -> []p) -> p)
    value = imp[outer, rng]
    failing = np.flatnonzero(value != algebra.top)
    if len(failing):
        return False, int(failing[0])
    return True, None


# ---------------------------------------------------------------------------
# JSON interface: heyting fields plus "box"


def tba_from_json(data: dict) -> FiniteTBA:
    if data.get("type") != "tba":
        raise ValueError("expected a tba object")
    return FiniteTBA(data["meet"], data["join"], data["imp"],
                     bot=data["bot"], box=data["box"])


def tba_to_json(algebra: FiniteTBA) -> dict:
    return {
        "type": "tba",
        "size": algebra.n,
        "bot": algebra.bot,
        "meet": algebra.meet.tolist(),
        "join": algebra.join.tolist(),
        "imp": algebra.imp.tolist(),
        "box": algebra.box.tolist(),
    }
