import itertools

import pytest

from twistlab import formula as fm
from twistlab import order, twist


@pytest.fixture(scope="session")
def chain2():
    return order.FinitePoset.from_pairs(2, [(0, 0), (1, 1), (0, 1)])


@pytest.fixture(scope="session")
def anti2():
    return order.FinitePoset.from_pairs(2, [(0, 0), (1, 1)])


@pytest.fixture(scope="session")
def three(chain2):
    "The 3-chain Heyting algebra: bot=0 < 1 < top=2."
    return order.heyting_from_poset(chain2)


@pytest.fixture(scope="session")
def bool2():
    poset = order.FinitePoset.from_pairs(1, [(0, 0)])
    return order.heyting_from_poset(poset)


@pytest.fixture(scope="session")
def bool4(anti2):
    return order.heyting_from_poset(anti2)


@pytest.fixture(scope="session")
def kleene_twist(three):
    "Tw(3-chain, {1, 2}, {0, 1}): the chi-validating, chi'-refuting model."
    return twist.tw(three, frozenset({1, 2}), frozenset({0, 1}))


@pytest.fixture(scope="session")
def posets3():
    return list(order.enumerate_posets(3))


@pytest.fixture(scope="session")
def posets4_classes():
    return list(order.enumerate_posets(4, dedup=True))


def slow_evaluate(structure, phi, valuation):
    """Independent reference evaluator: plain recursion, no numpy."""
    if isinstance(structure, twist.TwistStructure):
        base = structure.base

        def walk(f):
            kind = f.kind
            if kind == "var":
                return valuation[f.name]
            if kind == "bot":
                return (base.bot, base.top)
            if kind == "sneg":
                a, b = walk(f.args[0])
                return (b, a)
            if kind == "box":
                a, b = walk(f.args[0])
                return (int(base.box[a]), int(base.dia_table[b]))
            if kind == "dia":
                a, b = walk(f.args[0])
                return (int(base.dia_table[a]), int(base.box[b]))
            (a, b), (c, d) = walk(f.args[0]), walk(f.args[1])
            if kind == "and":
                return (int(base.meet[a, c]), int(base.join[b, d]))
            if kind == "or":
                return (int(base.join[a, c]), int(base.meet[b, d]))
            if kind == "imp":
                return (int(base.imp[a, c]), int(base.meet[a, d]))
            raise ValueError(kind)

        return walk(phi)

    def walk(f):
        kind = f.kind
        if kind == "var":
            return valuation[f.name]
        if kind == "bot":
            return structure.bot
        if kind == "box":
            return int(structure.box[walk(f.args[0])])
        if kind == "dia":
            return int(structure.dia_table[walk(f.args[0])])
        a = walk(f.args[0])
        if kind == "and":
            return int(structure.meet[a, walk(f.args[1])])
        if kind == "or":
            return int(structure.join[a, walk(f.args[1])])
        if kind == "imp":
            return int(structure.imp[a, walk(f.args[1])])
        raise ValueError(kind)

    return walk(phi)


def slow_is_valid(structure, phi):
    """Independent reference validity: exhaust valuations with plain loops.

    Returns (valid, least witness | None) matching the library's ordering
    contract.
    """
    psi = fm.desugar(phi, _target_of(structure))
    names = sorted(fm.free_vars(psi))
    if isinstance(structure, twist.TwistStructure):
        values = structure.pairs
        top = structure.base.top

        def ok(result):
            return result[0] == top
    else:
        values = list(range(structure.n))
        top = structure.top

        def ok(result):
            return result == top

    for combo in itertools.product(values, repeat=len(names)):
        valuation = dict(zip(names, combo))
        if not ok(slow_evaluate(structure, psi, valuation)):
            return False, valuation
    return True, None


def _target_of(structure):
    if isinstance(structure, twist.TwistStructure):
        return fm.LanguageTag.Lsbox if structure.modal else fm.LanguageTag.Ls
    from twistlab.tba import FiniteTBA

    if isinstance(structure, FiniteTBA):
        return fm.LanguageTag.Lbox
    return fm.LanguageTag.Li
