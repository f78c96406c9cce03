"""Propositional formulas with strong negation and modalities.

Four languages share one AST:

    Li    {and, or, imp, bot}              intuitionistic core
    Ls    Li + strong negation  ~          Nelson-style
    Lbox  Li + box              []         modal (diamond is sugar)
    Lsbox Li + ~, [], <>                   modal with strong negation

Sugar kinds (``neg``, ``iff``, ``siff``, and ``dia`` in Lbox position) are
accepted by the parser and eliminated by :func:`desugar`.
"""

from __future__ import annotations

import enum

__all__ = [
    "Formula", "LanguageTag", "ParseError",
    "Var", "Bot", "SNeg", "And", "Or", "Imp", "Box", "Dia",
    "Neg", "Iff", "SIff",
    "parse", "pretty", "desugar", "language_of", "free_vars", "substitute",
    "godel_tarski", "belnap_translate", "is_tb_normal", "axioms",
    "AXIOM_SETS",
]

CORE_KINDS = frozenset({"var", "bot", "sneg", "and", "or", "imp", "box", "dia"})
SUGAR_KINDS = frozenset({"neg", "iff", "siff"})
BINARY_KINDS = frozenset({"and", "or", "imp", "iff", "siff"})
UNARY_KINDS = frozenset({"sneg", "neg", "box", "dia"})


class LanguageTag(enum.Enum):
    Li = "Li"
    Ls = "Ls"
    Lbox = "Lbox"
    Lsbox = "Lsbox"


class Formula:
    """Immutable formula node; instances are interned, so equal formulas
    are the same object within a process."""

    __slots__ = ("kind", "args", "height", "_hash")

    def __init__(self, kind, args, height, hashv):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "height", height)
        object.__setattr__(self, "_hash", hashv)

    def __setattr__(self, name, value):
        raise AttributeError("Formula is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        return (self._hash == other._hash and self.kind == other.kind
                and self.args == other.args)

    def __repr__(self):
        return f"<{pretty(self)}>"

    def __reduce__(self):
        return (_make, (self.kind, self.args))

    @property
    def name(self):
        if self.kind != "var":
            raise AttributeError("only variables have a name")
        return self.args[0]


_interned: dict = {}


def _make(kind, args):
    key = (kind, args)
    cached = _interned.get(key)
    if cached is not None:
        return cached
    if kind == "var":
        height = 0
        hashv = hash(key)
    else:
        height = 1 + max((a.height for a in args), default=-1)
        hashv = hash((kind,) + tuple(a._hash for a in args))
    node = Formula(kind, args, height, hashv)
    _interned[key] = node
    return node


def Var(name: str) -> Formula:
    return _make("var", (name,))


Bot = _make("bot", ())


def SNeg(phi):
    return _make("sneg", (phi,))


def And(phi, psi):
    return _make("and", (phi, psi))


def Or(phi, psi):
    return _make("or", (phi, psi))


def Imp(phi, psi):
    return _make("imp", (phi, psi))


def Box(phi):
    return _make("box", (phi,))


def Dia(phi):
    return _make("dia", (phi,))


def Neg(phi):
    "Intuitionistic negation, sugar for phi -> bot."
    return _make("neg", (phi,))


def Iff(phi, psi):
    "Equivalence, sugar for (phi -> psi) & (psi -> phi)."
    return _make("iff", (phi, psi))


def SIff(phi, psi):
    "Strong equivalence, sugar for (phi <-> psi) & (~phi <-> ~psi)."
    return _make("siff", (phi, psi))


# ---------------------------------------------------------------------------
# Concrete syntax


class ParseError(ValueError):
    def __init__(self, message, line, column):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


_SYMBOLS = ("<=>", "<->", "<>", "->", "[]", "~", "!", "&", "|", "(", ")")


def _tokenize(text):
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append((sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            if c.islower():
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                tokens.append(("ident", text[i:j], line, col))
                col += j - i
                i = j
            else:
                raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(("end", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def error(self, message):
        tok = self.peek()
        raise ParseError(message, tok[-2], tok[-1])

    def accept(self, sym):
        if self.tokens[self.pos][0] == sym:
            self.pos += 1
            return True
        return False

    def expect(self, sym):
        if not self.accept(sym):
            self.error(f"expected {sym!r}")

    # precedence, loosest first: <=>  <->  ->  |  &  unary
    def siff(self):
        lhs = self.iff()
        if self.accept("<=>"):
            return SIff(lhs, self.siff())
        return lhs

    def iff(self):
        lhs = self.imp()
        if self.accept("<->"):
            return Iff(lhs, self.iff())
        return lhs

    def imp(self):
        lhs = self.disj()
        if self.accept("->"):
            return Imp(lhs, self.imp())
        return lhs

    def disj(self):
        lhs = self.conj()
        while self.accept("|"):
            lhs = Or(lhs, self.conj())
        return lhs

    def conj(self):
        lhs = self.unary()
        while self.accept("&"):
            lhs = And(lhs, self.unary())
        return lhs

    def unary(self):
        if self.accept("~"):
            return SNeg(self.unary())
        if self.accept("!"):
            return Neg(self.unary())
        if self.accept("[]"):
            return Box(self.unary())
        if self.accept("<>"):
            return Dia(self.unary())
        return self.atom()

    def atom(self):
        tok = self.peek()
        if tok[0] == "ident":
            self.pos += 1
            if tok[1] == "bot":
                return Bot
            return Var(tok[1])
        if self.accept("("):
            inner = self.siff()
            self.expect(")")
            return inner
        self.error(f"expected a formula, found {tok[0]!r}")


def parse(text: str) -> Formula:
    """Parse concrete syntax; sugar connectives are kept in the AST."""
    parser = _Parser(_tokenize(text))
    phi = parser.siff()
    if parser.peek()[0] != "end":
        parser.error("trailing input")
    return phi


_SIGIL = {"and": "&", "or": "|", "imp": "->", "iff": "<->", "siff": "<=>",
          "sneg": "~", "neg": "!", "box": "[]", "dia": "<>"}


def pretty(phi: Formula) -> str:
    """Render a formula; output always reparses to the same tree.

    Arguments of binary connectives are parenthesised unless atomic;
    arguments of unary connectives only when binary.
    """
    kind = phi.kind
    if kind == "var":
        return phi.name
    if kind == "bot":
        return "bot"
    if kind in UNARY_KINDS:
        inner = phi.args[0]
        body = pretty(inner)
        if inner.kind in BINARY_KINDS:
            body = f"({body})"
        return _SIGIL[kind] + body
    left, right = (pretty(a) for a in phi.args)
    if phi.args[0].kind not in ("var", "bot"):
        left = f"({left})"
    if phi.args[1].kind not in ("var", "bot"):
        right = f"({right})"
    return f"{left} {_SIGIL[kind]} {right}"


# ---------------------------------------------------------------------------
# Desugaring and language classification


def _contains(phi, kinds):
    if phi.kind in kinds:
        return True
    return phi.kind != "var" and any(_contains(a, kinds) for a in phi.args)


def desugar(phi: Formula, target: LanguageTag | None = None) -> Formula:
    """Eliminate neg/iff/siff; eliminate dia as !([]!...) unless the target
    language keeps it primitive.

    When ``target`` is None it is inferred from content: a formula with
    strong negation lives in Lsbox (dia primitive), otherwise any modality
    puts it in Lbox (dia is sugar for the boxed double negation).
    Idempotent.
    """
    if target is None:
        if _contains(phi, ("sneg",)):
            target = LanguageTag.Lsbox
        elif _contains(phi, ("box", "dia")):
            target = LanguageTag.Lbox
        else:
            target = LanguageTag.Li
    keep_dia = target == LanguageTag.Lsbox

    def walk(f):
        kind = f.kind
        if kind in ("var", "bot"):
            return f
        if kind == "neg":
            return Imp(walk(f.args[0]), Bot)
        if kind == "iff":
            a, b = (walk(x) for x in f.args)
            return And(Imp(a, b), Imp(b, a))
        if kind == "siff":
            a, b = (walk(x) for x in f.args)
            return And(And(Imp(a, b), Imp(b, a)),
                       And(Imp(SNeg(a), SNeg(b)), Imp(SNeg(b), SNeg(a))))
        if kind == "dia" and not keep_dia:
            inner = walk(f.args[0])
            return Imp(Box(Imp(inner, Bot)), Bot)
        args = tuple(walk(a) for a in f.args)
        if args == f.args:
            return f
        return _make(kind, args)

    return walk(phi)


def language_of(phi: Formula) -> LanguageTag:
    """Smallest language containing a desugared formula."""
    if phi.kind in SUGAR_KINDS or any(
            a.kind in SUGAR_KINDS for a in _subformulas(phi)):
        raise ValueError("language_of expects a desugared formula")
    has_sneg = _contains(phi, ("sneg",))
    has_modal = _contains(phi, ("box", "dia"))
    if has_sneg and has_modal:
        return LanguageTag.Lsbox
    if has_sneg:
        return LanguageTag.Ls
    if has_modal:
        return LanguageTag.Lbox
    return LanguageTag.Li


def _subformulas(phi):
    yield phi
    if phi.kind != "var":
        for a in phi.args:
            yield from _subformulas(a)


def free_vars(phi: Formula) -> frozenset:
    if phi.kind == "var":
        return frozenset((phi.name,))
    out = frozenset()
    for a in phi.args:
        out |= free_vars(a)
    return out


def substitute(phi: Formula, mapping: dict) -> Formula:
    """Simultaneous substitution of formulas for variables."""
    if phi.kind == "var":
        return mapping.get(phi.name, phi)
    if phi.kind == "bot":
        return phi
    args = tuple(substitute(a, mapping) for a in phi.args)
    if args == phi.args:
        return phi
    return _make(phi.kind, args)


# ---------------------------------------------------------------------------
# The two embeddings into modal languages

_gt_cache: dict = {}


def godel_tarski(phi: Formula) -> Formula:
    """Embed an intuitionistic formula into the box language:
    variables and implications are boxed, the lattice connectives commute.
    """
    if language_of(phi) != LanguageTag.Li:
        raise ValueError("godel_tarski is defined on Li formulas only")
    return _gt(phi)


def _gt(phi):
    cached = _gt_cache.get(phi)
    if cached is not None:
        return cached
    kind = phi.kind
    if kind == "var":
        out = Box(phi)
    elif kind == "bot":
        out = phi
    elif kind == "and":
        out = And(_gt(phi.args[0]), _gt(phi.args[1]))
    elif kind == "or":
        out = Or(_gt(phi.args[0]), _gt(phi.args[1]))
    elif kind == "imp":
        out = Box(Imp(_gt(phi.args[0]), _gt(phi.args[1])))
    else:  # pragma: no cover - guarded by language_of
        raise ValueError(f"unexpected connective {kind!r}")
    _gt_cache[phi] = out
    return out


_tb_cache: dict = {}


def belnap_translate(phi: Formula) -> Formula:
    """Extend the boxed embedding to strong negation.

    Strong negation is pushed through the positive connectives (De Morgan
    on and/or, conjunctive reading of a negated implication), double strong
    negations cancel, and the residual ~ is boxed together with its
    variable.  The output has ~ only on variables and bot, and the
    restriction to Li coincides with godel_tarski.
    """
    if language_of(phi) not in (LanguageTag.Li, LanguageTag.Ls):
        raise ValueError("belnap_translate rejects modal input")
    return _tb(phi)


def _tb(phi):
    cached = _tb_cache.get(phi)
    if cached is not None:
        return cached
    kind = phi.kind
    if kind == "var":
        out = Box(phi)
    elif kind == "bot":
        out = phi
    elif kind == "and":
        out = And(_tb(phi.args[0]), _tb(phi.args[1]))
    elif kind == "or":
        out = Or(_tb(phi.args[0]), _tb(phi.args[1]))
    elif kind == "imp":
        out = Box(Imp(_tb(phi.args[0]), _tb(phi.args[1])))
    elif kind == "sneg":
        inner = phi.args[0]
        ikind = inner.kind
        if ikind == "var":
            out = Box(phi)
        elif ikind == "bot":
            out = phi
        elif ikind == "and":
            out = Or(_tb(SNeg(inner.args[0])), _tb(SNeg(inner.args[1])))
        elif ikind == "or":
            out = And(_tb(SNeg(inner.args[0])), _tb(SNeg(inner.args[1])))
        elif ikind == "imp":
            out = And(_tb(inner.args[0]), _tb(SNeg(inner.args[1])))
        else:  # sneg: even iterations cancel
            out = _tb(inner.args[0])
    else:  # pragma: no cover - guarded by language_of
        raise ValueError(f"unexpected connective {kind!r}")
    _tb_cache[phi] = out
    return out


def is_tb_normal(phi: Formula) -> bool:
    """True when every strong negation wraps a variable or bot."""
    if phi.kind == "sneg":
        return phi.args[0].kind in ("var", "bot")
    if phi.kind == "var":
        return True
    return all(is_tb_normal(a) for a in phi.args)


# ---------------------------------------------------------------------------
# Built-in axiom schemes

_p, _q, _r = Var("p"), Var("q"), Var("r")

_INT = (
    Imp(_p, Imp(_q, _p)),
    Imp(Imp(_p, Imp(_q, _r)), Imp(Imp(_p, _q), Imp(_p, _r))),
    Imp(And(_p, _q), _p),
    Imp(And(_p, _q), _q),
    Imp(_p, Imp(_q, And(_p, _q))),
    Imp(_p, Or(_p, _q)),
    Imp(_q, Or(_p, _q)),
    Imp(Imp(_p, _r), Imp(Imp(_q, _r), Imp(Or(_p, _q), _r))),
    Imp(Bot, _p),
)

_SNEG = (
    Iff(SNeg(Or(_p, _q)), And(SNeg(_p), SNeg(_q))),
    Iff(SNeg(And(_p, _q)), Or(SNeg(_p), SNeg(_q))),
    Iff(SNeg(Imp(_p, _q)), And(_p, SNeg(_q))),
    Iff(SNeg(SNeg(_p)), _p),
    SNeg(Bot),
)

_S4MODAL = (
    Box(Imp(_p, _p)),
    Imp(And(Box(_p), Box(_q)), Box(And(_p, _q))),
    Imp(Box(_p), _p),
    Imp(Box(_p), Box(Box(_p))),
)

_BS4INTERPLAY = (
    Iff(Neg(Box(_p)), Dia(Neg(_p))),
    Iff(Neg(Dia(_p)), Box(Neg(_p))),
    SIff(Box(_p), SNeg(Dia(SNeg(_p)))),
    SIff(Dia(_p), SNeg(Box(SNeg(_p)))),
)

_EXCLUDED_MIDDLE = (Or(_p, Neg(_p)),)

_GRZ = (Imp(Box(Imp(Box(Imp(_p, Box(_p))), _p)), _p),)

KLEENE_AXIOM = Imp(And(_p, SNeg(_p)), Or(_q, SNeg(_q)))
KLEENE_PRIME_AXIOM = Imp(Neg(Neg(And(_p, SNeg(_p)))), Or(_q, SNeg(_q)))
CLOSED_IDEAL_AXIOM = Iff(Neg(Neg(And(_p, SNeg(_p)))), And(_p, SNeg(_p)))

AXIOM_SETS = {
    "INT": _INT,
    "SNEG": _SNEG,
    "S4MODAL": _S4MODAL,
    "BS4INTERPLAY": _BS4INTERPLAY,
    "N4BOT": _INT + _SNEG,
    "S4": _INT + _EXCLUDED_MIDDLE + _S4MODAL,
    "BS4": _INT + _EXCLUDED_MIDDLE + _S4MODAL + _SNEG + _BS4INTERPLAY,
    "GRZ": _GRZ,
    "KLEENE": (KLEENE_AXIOM,),
    "KLEENE_PRIME": (KLEENE_PRIME_AXIOM,),
    "CLOSED_IDEAL_AXIOM": (CLOSED_IDEAL_AXIOM,),
}


def axioms(name: str) -> tuple:
    """Axiom schemes by set name; sugar connectives are kept as written."""
    try:
        return AXIOM_SETS[name.upper()]
    except KeyError:
        raise ValueError(f"unknown axiom set {name!r}") from None
