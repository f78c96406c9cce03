"""Finite posets and their up-set Heyting algebras.

Elements are 0..n-1; the order relation is kept as one bitmask per element
(``up[i]`` has bit j set when i <= j).  Subsets of the carrier are plain
bitmask ints throughout.
"""

from __future__ import annotations

from itertools import permutations

import numpy as np

from .heyting import FiniteHeytingAlgebra

__all__ = [
    "FinitePoset", "validate_poset", "up_sets", "down_sets",
    "heyting_from_poset", "join_irreducible_poset", "enumerate_posets",
    "poset_from_json", "poset_to_json",
]


class FinitePoset:
    """Partial order on 0..n-1, stored as per-element up-masks."""

    __slots__ = ("n", "up")

    def __init__(self, n: int, up: tuple):
        self.n = n
        self.up = tuple(up)

    @classmethod
    def from_pairs(cls, n, pairs, closure=False):
        """Build from (i, j) pairs meaning i <= j.

        With ``closure`` the reflexive-transitive closure is applied first;
        otherwise the relation is taken exactly as given.
        """
        up = [0] * n
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"pair ({i}, {j}) out of range for size {n}")
            up[i] |= 1 << j
        if closure:
            for i in range(n):
                up[i] |= 1 << i
            changed = True
            while changed:
                changed = False
                for i in range(n):
                    mask = up[i]
                    acc = mask
                    j = 0
                    while mask:
                        if mask & 1:
                            acc |= up[j]
                        mask >>= 1
                        j += 1
                    if acc != up[i]:
                        up[i] = acc
                        changed = True
        return cls(n, tuple(up))

    def leq(self, i, j) -> bool:
        return bool(self.up[i] >> j & 1)

    def pairs(self):
        return [(i, j) for i in range(self.n) for j in range(self.n)
                if self.up[i] >> j & 1]

    def relation_mask(self) -> int:
        """All pairs packed into one int, row-major; fixes enumeration order."""
        mask = 0
        for i in range(self.n):
            mask |= self.up[i] << (i * self.n)
        return mask

    def up_closure_mask(self, subset: int) -> int:
        out = 0
        i, mask = 0, subset
        while mask:
            if mask & 1:
                out |= self.up[i]
            mask >>= 1
            i += 1
        return out

    def is_up_set(self, subset: int) -> bool:
        return self.up_closure_mask(subset) == subset

    def maximal_mask(self) -> int:
        """Elements with no strictly greater element."""
        out = 0
        for i in range(self.n):
            if self.up[i] == 1 << i:
                out |= 1 << i
        return out

    def canonical_key(self):
        """Least relation mask over all relabelings; isomorphism invariant."""
        best = None
        for perm in permutations(range(self.n)):
            mask = 0
            for i in range(self.n):
                row = self.up[i]
                new_row = 0
                j = 0
                while row:
                    if row & 1:
                        new_row |= 1 << perm[j]
                    row >>= 1
                    j += 1
                mask |= new_row << (perm[i] * self.n)
            if best is None or mask < best:
                best = mask
        return (self.n, best)

    def __eq__(self, other):
        return (isinstance(other, FinitePoset)
                and self.n == other.n and self.up == other.up)

    def __hash__(self):
        return hash((self.n, self.up))

    def __repr__(self):
        strict = [(i, j) for i, j in self.pairs() if i != j]
        return f"FinitePoset(n={self.n}, lt={strict})"


def validate_poset(poset: FinitePoset):
    """None when the relation is a partial order, else the first violation."""
    n, up = poset.n, poset.up
    if n < 1:
        return "carrier must be non-empty"
    for i in range(n):
        if not up[i] >> i & 1:
            return f"reflexivity violated: ({i}, {i}) missing"
    for i in range(n):
        for j in range(n):
            if i != j and up[i] >> j & 1 and up[j] >> i & 1:
                return f"antisymmetry violated: ({i}, {j}) and ({j}, {i})"
    for i in range(n):
        mask = up[i]
        j = 0
        while mask:
            if mask & 1 and up[j] & ~up[i]:
                k = (up[j] & ~up[i]).bit_length() - 1
                return (f"transitivity violated: ({i}, {j}) and ({j}, {k}) "
                        f"but ({i}, {k}) missing")
            mask >>= 1
            j += 1
    return None


def _check(poset):
    report = validate_poset(poset)
    if report is not None:
        raise ValueError(report)


def up_sets(poset: FinitePoset) -> list:
    """All up-closed subsets as bitmasks, sorted by (popcount, value)."""
    _check(poset)
    found = [s for s in range(1 << poset.n) if poset.is_up_set(s)]
    found.sort(key=lambda s: (bin(s).count("1"), s))
    return found


def down_sets(poset: FinitePoset) -> list:
    """All down-closed subsets as bitmasks, sorted by (popcount, value)."""
    _check(poset)
    full = (1 << poset.n) - 1
    found = [s for s in range(1 << poset.n)
             if poset.is_up_set(full & ~s)]
    found.sort(key=lambda s: (bin(s).count("1"), s))
    return found


def heyting_from_poset(poset: FinitePoset) -> FiniteHeytingAlgebra:
    """Heyting algebra of up-sets: meet/join are intersection/union and
    U -> V is the largest up-set whose meet with U lies in V."""
    elems = up_sets(poset)
    index = {s: i for i, s in enumerate(elems)}
    m = len(elems)
    full = (1 << poset.n) - 1
    meet = np.empty((m, m), dtype=np.intp)
    join = np.empty((m, m), dtype=np.intp)
    imp = np.empty((m, m), dtype=np.intp)
    for a, sa in enumerate(elems):
        for b, sb in enumerate(elems):
            meet[a, b] = index[sa & sb]
            join[a, b] = index[sa | sb]
            # x is in U -> V unless something above x is in U but not V
            escape = sa & ~sb
            bad = 0
            for x in range(poset.n):
                if poset.up[x] & escape:
                    bad |= 1 << x
            imp[a, b] = index[full & ~bad]
    algebra = FiniteHeytingAlgebra(meet, join, imp, bot=index[0])
    algebra.check()
    return algebra


def join_irreducible_poset(algebra: FiniteHeytingAlgebra) -> FinitePoset:
    """Poset of join-irreducible elements under the reversed algebra order.

    The reversal makes ``a -> {irreducible j : j <= a}`` an isomorphism onto
    the up-sets of the result, so composing with heyting_from_poset round
    trips.  Returns the poset together with the list of irreducibles via
    the companion function s_of in the tba module; here only the poset.
    """
    irr = algebra.join_irreducibles()
    n = len(irr)
    up = []
    for i in range(n):
        mask = 0
        for j in range(n):
            if algebra.leq(irr[j], irr[i]):
                mask |= 1 << j
        up.append(mask)
    return FinitePoset(n, tuple(up))


def _extensions(n, up, dsets, usets):
    """All ways to attach element n with a (down-set, up-set) pair."""
    out = []
    for d in dsets:
        for u in usets:
            if d & u:
                continue
            ok = True
            mask, i = d, 0
            while mask:
                if mask & 1 and u & ~up[i]:
                    ok = False
                    break
                mask >>= 1
                i += 1
            if ok:
                out.append((d, u))
    return out


def enumerate_posets(max_n: int, dedup: bool = False):
    """Yield every labeled poset of size 1..max_n, ordered by size then by
    relation mask.  With ``dedup`` only one representative per isomorphism
    class is produced (still in that order)."""
    if max_n < 1:
        return
    level = [FinitePoset(1, (1,))]
    for n in range(1, max_n + 1):
        batch = sorted(level, key=lambda p: p.relation_mask())
        if dedup:
            seen = set()
            for poset in batch:
                key = poset.canonical_key()
                if key not in seen:
                    seen.add(key)
                    yield poset
        else:
            yield from batch
        if n == max_n:
            break
        nxt = []
        for poset in level:
            dsets = [s for s in range(1 << n)
                     if poset.is_up_set(((1 << n) - 1) & ~s)]
            usets = [s for s in range(1 << n) if poset.is_up_set(s)]
            newbit = 1 << n
            for d, u in _extensions(n, poset.up, dsets, usets):
                up = list(poset.up)
                mask, i = d, 0
                while mask:
                    if mask & 1:
                        up[i] |= newbit
                    mask >>= 1
                    i += 1
                up.append(u | newbit)
                nxt.append(FinitePoset(n + 1, tuple(up)))
        level = nxt


# ---------------------------------------------------------------------------
# JSON interface: {"type": "poset", "size": n, "le": [[i, j], ...],
#                  "closure": bool?}


def poset_from_json(data: dict) -> FinitePoset:
    if data.get("type") != "poset":
        raise ValueError("expected a poset object")
    n = data["size"]
    pairs = [tuple(pair) for pair in data.get("le", [])]
    return FinitePoset.from_pairs(n, pairs, closure=bool(data.get("closure")))


def poset_to_json(poset: FinitePoset) -> dict:
    return {"type": "poset", "size": poset.n, "le": poset.pairs()}
