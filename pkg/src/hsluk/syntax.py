"""Terms, formulas, sequents and hypersequents.

Formulas are built from predicate atoms, rational truth constants,
implication and the two quantifiers.  Two extra families of atoms,
"semipropositional" variables of type 0 and type 1, stand for unknown
truth values that are bounded on one side only; a third family
("special", tag 2) is unbounded on both sides and only appears in
density-extended calculi.

Sequents are pairs of formula multisets, hypersequents are multisets of
sequents.  Multiset equality is what == means on both.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Param:
    """A parameter (free individual constant), written #a."""

    name: str

    def __str__(self):
        return "#" + self.name


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple

    def __str__(self):
        return "%s(%s)" % (self.name, ", ".join(str(a) for a in self.args))


Term = Var | Param | Func

# ------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.pred
        return "%s(%s)" % (self.pred, ", ".join(str(a) for a in self.args))


@dataclass(frozen=True)
class Const:
    """Truth constant; value is a rational in [0, 1]."""

    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))
        if not 0 <= self.value <= 1:
            raise ValueError("truth constant out of [0,1]: %s" % (self.value,))

    def __str__(self):
        if self.value == 0:
            return "0"
        return "r(%d/%d)" % (self.value.numerator, self.value.denominator)


@dataclass(frozen=True)
class SpVar:
    """Semipropositional variable: tag 0, 1 or 2 (special)."""

    tag: int
    index: int

    def __post_init__(self):
        if self.tag not in (0, 1, 2):
            raise ValueError("bad spvar tag %r" % (self.tag,))

    def __str__(self):
        return "$%d_%d" % (self.tag, self.index)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        lhs = str(self.left)
        if isinstance(self.left, (Implies, Quant)):
            lhs = "(" + lhs + ")"
        return "%s -> %s" % (lhs, self.right)


@dataclass(frozen=True)
class Quant:
    kind: str  # "forall" or "exists"
    var: str
    body: "Formula"

    def __post_init__(self):
        if self.kind not in ("forall", "exists"):
            raise ValueError("bad quantifier %r" % (self.kind,))

    def __str__(self):
        return "%s %s. %s" % (self.kind, self.var, self.body)


Formula = Atom | Const | SpVar | Implies | Quant

ZERO = Const(Fraction(0))


def is_atomic(f: Formula) -> bool:
    return isinstance(f, (Atom, Const, SpVar))


def is_rpl_formula(f: Formula) -> bool:
    """No semipropositional variables anywhere."""
    if isinstance(f, SpVar):
        return False
    if isinstance(f, Implies):
        return is_rpl_formula(f.left) and is_rpl_formula(f.right)
    if isinstance(f, Quant):
        return is_rpl_formula(f.body)
    return True


def is_luk_formula(f: Formula) -> bool:
    """No spvars and no truth constants other than 0."""
    if isinstance(f, SpVar):
        return False
    if isinstance(f, Const):
        return f.value == 0
    if isinstance(f, Implies):
        return is_luk_formula(f.left) and is_luk_formula(f.right)
    if isinstance(f, Quant):
        return is_luk_formula(f.body)
    return True


# ----------------------------------------------------- sequent machinery


@dataclass(frozen=True)
class Sequent:
    ant: tuple
    suc: tuple

    def __post_init__(self):
        object.__setattr__(self, "ant", tuple(self.ant))
        object.__setattr__(self, "suc", tuple(self.suc))

    def _mkey(self):
        k = self.__dict__.get("_mk")
        if k is None:
            k = (
                frozenset(Counter(self.ant).items()),
                frozenset(Counter(self.suc).items()),
            )
            object.__setattr__(self, "_mk", k)
        return k

    def __eq__(self, other):
        if not isinstance(other, Sequent):
            return NotImplemented
        return self._mkey() == other._mkey()

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self._mkey())
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self):
        lhs = ", ".join(str(f) for f in self.ant)
        rhs = ", ".join(str(f) for f in self.suc)
        if lhs:
            return "%s => %s" % (lhs, rhs) if rhs else "%s =>" % lhs
        return "=> %s" % rhs if rhs else "=>"

    def is_atomic(self) -> bool:
        return all(is_atomic(f) for f in self.ant) and all(
            is_atomic(f) for f in self.suc
        )

    def formulas(self):
        return self.ant + self.suc

    def without(self, side: str, slot: int) -> "Sequent":
        """Drop the formula at ant/suc position slot."""
        if side == "L":
            return Sequent(self.ant[:slot] + self.ant[slot + 1 :], self.suc)
        return Sequent(self.ant, self.suc[:slot] + self.suc[slot + 1 :])

    def replaced(self, side: str, slot: int, f: Formula) -> "Sequent":
        if side == "L":
            return Sequent(
                self.ant[:slot] + (f,) + self.ant[slot + 1 :], self.suc
            )
        return Sequent(self.ant, self.suc[:slot] + (f,) + self.suc[slot + 1 :])

    def extended(self, ant=(), suc=()) -> "Sequent":
        return Sequent(self.ant + tuple(ant), self.suc + tuple(suc))

    def at(self, side: str, slot: int) -> Formula:
        return self.ant[slot] if side == "L" else self.suc[slot]


def merge(a: Sequent, b: Sequent) -> Sequent:
    return Sequent(a.ant + b.ant, a.suc + b.suc)


@dataclass(frozen=True)
class Hypersequent:
    comps: tuple

    def __post_init__(self):
        object.__setattr__(self, "comps", tuple(self.comps))

    def _mkey(self):
        k = self.__dict__.get("_mk")
        if k is None:
            k = frozenset(Counter(self.comps).items())
            object.__setattr__(self, "_mk", k)
        return k

    def __eq__(self, other):
        if not isinstance(other, Hypersequent):
            return NotImplemented
        return self._mkey() == other._mkey()

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self._mkey())
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self):
        return " | ".join(str(s) for s in self.comps)

    def __len__(self):
        return len(self.comps)

    def replaced(self, i: int, *seqs: Sequent) -> "Hypersequent":
        return Hypersequent(self.comps[:i] + tuple(seqs) + self.comps[i + 1 :])

    def without(self, i: int) -> "Hypersequent":
        return Hypersequent(self.comps[:i] + self.comps[i + 1 :])

    def extended(self, *seqs: Sequent) -> "Hypersequent":
        return Hypersequent(self.comps + tuple(seqs))

    def formulas(self):
        for s in self.comps:
            yield from s.formulas()


def hs(*comps: Sequent) -> Hypersequent:
    return Hypersequent(comps)


def seq(ant=(), suc=()) -> Sequent:
    return Sequent(tuple(ant), tuple(suc))


def atomic_part(h: Hypersequent) -> Hypersequent:
    return Hypersequent(tuple(s for s in h.comps if s.is_atomic()))


# --------------------------------------------------------- substitution


def term_free_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Func):
        out = set()
        for a in t.args:
            out |= term_free_vars(a)
        return out
    return set()


def free_vars(f: Formula) -> set:
    if isinstance(f, Atom):
        out = set()
        for a in f.args:
            out |= term_free_vars(a)
        return out
    if isinstance(f, Implies):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Quant):
        return free_vars(f.body) - {f.var}
    return set()


def is_closed_term(t: Term) -> bool:
    return not term_free_vars(t)


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def free_for(t: Term, x: str, f: Formula) -> bool:
    """True when substituting t for free x in f captures no variable of t."""
    tv = term_free_vars(t)
    if not tv:
        return True

    def walk(g: Formula, bound: frozenset) -> bool:
        if isinstance(g, Atom):
            if x in free_vars(g) and tv & bound:
                return False
            return True
        if isinstance(g, Implies):
            return walk(g.left, bound) and walk(g.right, bound)
        if isinstance(g, Quant):
            if g.var == x:
                return True
            return walk(g.body, bound | {g.var})
        return True

    return walk(f, frozenset())


def term_subst(t: Term, x: str, r: Term) -> Term:
    if isinstance(t, Var):
        return r if t.name == x else t
    if isinstance(t, Func):
        return Func(t.name, tuple(term_subst(a, x, r) for a in t.args))
    return t


def substitute(f: Formula, x: str, t: Term) -> Formula:
    """f[x/t]; raises ValueError if t is not free for x in f."""
    if not free_for(t, x, f):
        raise ValueError("%s is not free for %s in %s" % (t, x, f))
    return _subst(f, x, t)


def _subst(f: Formula, x: str, t: Term) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(term_subst(a, x, t) for a in f.args))
    if isinstance(f, Implies):
        return Implies(_subst(f.left, x, t), _subst(f.right, x, t))
    if isinstance(f, Quant):
        if f.var == x:
            return f
        return Quant(f.kind, f.var, _subst(f.body, x, t))
    return f


# ------------------------------------------------- symbol bookkeeping


def term_symbols(t: Term, out: set):
    if isinstance(t, Var):
        out.add(("var", t.name))
    elif isinstance(t, Param):
        out.add(("param", t.name))
    else:
        out.add(("func", t.name))
        for a in t.args:
            term_symbols(a, out)


def formula_symbols(f: Formula, out: set):
    if isinstance(f, Atom):
        out.add(("pred", f.pred))
        for a in f.args:
            term_symbols(a, out)
    elif isinstance(f, SpVar):
        out.add(("spvar", f.tag, f.index))
    elif isinstance(f, Implies):
        formula_symbols(f.left, out)
        formula_symbols(f.right, out)
    elif isinstance(f, Quant):
        out.add(("var", f.var))
        formula_symbols(f.body, out)


def symbols_of(obj) -> set:
    """Symbol occurrences of a term/formula/sequent/hypersequent or tuple."""
    out = set()

    def go(o):
        if o is None:
            return
        if isinstance(o, (Var, Param, Func)):
            term_symbols(o, out)
        elif isinstance(o, (Atom, Const, SpVar, Implies, Quant)):
            formula_symbols(o, out)
        elif isinstance(o, (Sequent, Hypersequent)):
            syms = o.__dict__.get("_syms")
            if syms is None:
                sub = set()
                parts = o.formulas() if isinstance(o, Sequent) else o.comps
                for f in parts:
                    sub |= symbols_of(f)
                syms = frozenset(sub)
                object.__setattr__(o, "_syms", syms)
            out.update(syms)
        elif isinstance(o, (tuple, list, set, frozenset)):
            for x in o:
                go(x)
        else:
            raise TypeError("cannot collect symbols of %r" % (o,))

    go(obj)
    return out


def occurs(sym, obj) -> bool:
    """sym is a Param or SpVar; does it occur in obj?"""
    if isinstance(sym, Param):
        return ("param", sym.name) in symbols_of(obj)
    if isinstance(sym, SpVar):
        return ("spvar", sym.tag, sym.index) in symbols_of(obj)
    raise TypeError("occurs() wants a Param or SpVar")


class NameSupply:
    """Dispenses parameters, spvars and predicate names avoiding a base set."""

    def __init__(self, avoid=()):
        self.used = set()
        for o in avoid:
            self.add(o)
        self._np = 0
        self._nsv = [0, 0, 0]
        self._npred = 0

    def add(self, obj):
        self.used |= symbols_of(obj)

    def fresh_param(self) -> Param:
        while True:
            self._np += 1
            p = Param("a%d" % self._np)
            if ("param", p.name) not in self.used:
                self.used.add(("param", p.name))
                return p

    def fresh_spvar(self, tag: int) -> SpVar:
        while True:
            self._nsv[tag] += 1
            v = SpVar(tag, self._nsv[tag])
            if ("spvar", tag, v.index) not in self.used:
                self.used.add(("spvar", tag, v.index))
                return v

    def fresh_pred(self) -> str:
        while True:
            self._npred += 1
            name = "q%d" % self._npred
            if ("pred", name) not in self.used:
                self.used.add(("pred", name))
                return name


# ------------------------------------------------- parameter renaming


def map_params_term(t: Term, m: dict) -> Term:
    if isinstance(t, Param):
        return m.get(t.name, t)
    if isinstance(t, Func):
        return Func(t.name, tuple(map_params_term(a, m) for a in t.args))
    return t


def map_params(f: Formula, m: dict) -> Formula:
    """Replace parameters by terms, m: name -> Term."""
    if not m:
        return f
    if isinstance(f, Atom):
        args = tuple(map_params_term(a, m) for a in f.args)
        return f if args == f.args else Atom(f.pred, args)
    if isinstance(f, Implies):
        l, r = map_params(f.left, m), map_params(f.right, m)
        return f if l is f.left and r is f.right else Implies(l, r)
    if isinstance(f, Quant):
        b = map_params(f.body, m)
        return f if b is f.body else Quant(f.kind, f.var, b)
    return f


def map_spvars(f: Formula, m: dict) -> Formula:
    """Replace spvars, m: (tag, index) -> SpVar."""
    if not m:
        return f
    if isinstance(f, SpVar):
        return m.get((f.tag, f.index), f)
    if isinstance(f, Implies):
        l, r = map_spvars(f.left, m), map_spvars(f.right, m)
        return f if l is f.left and r is f.right else Implies(l, r)
    if isinstance(f, Quant):
        b = map_spvars(f.body, m)
        return f if b is f.body else Quant(f.kind, f.var, b)
    return f


def map_atoms(f: Formula, m: dict) -> Formula:
    """Replace 0-ary predicate atoms by formulas, m: pred name -> Formula."""
    if isinstance(f, Atom) and not f.args and f.pred in m:
        return m[f.pred]
    if isinstance(f, Implies):
        return Implies(map_atoms(f.left, m), map_atoms(f.right, m))
    if isinstance(f, Quant):
        return Quant(f.kind, f.var, map_atoms(f.body, m))
    return f


def seq_map(s: Sequent, fn) -> Sequent:
    ant = tuple(fn(f) for f in s.ant)
    suc = tuple(fn(f) for f in s.suc)
    if all(a is b for a, b in zip(ant, s.ant)) and all(
        a is b for a, b in zip(suc, s.suc)
    ):
        return s
    return Sequent(ant, suc)


def hs_map(h: Hypersequent, fn) -> Hypersequent:
    comps = tuple(seq_map(s, fn) for s in h.comps)
    if all(a is b for a, b in zip(comps, h.comps)):
        return h
    return Hypersequent(comps)


# ------------------------------------------------------ tilde rewrite


def tilde(f: Formula, table: dict) -> Formula:
    """Replace truth constants other than 0 by propositional variables.

    table maps Fraction -> predicate name and is extended in place, so a
    shared table keeps the replacement injective across several formulas.
    """
    if isinstance(f, Const):
        if f.value == 0:
            return f
        if f.value not in table:
            taken = set(table.values())
            i = len(table) + 1
            while "c%d" % i in taken:
                i += 1
            table[f.value] = "c%d" % i
        return Atom(table[f.value])
    if isinstance(f, Implies):
        return Implies(tilde(f.left, table), tilde(f.right, table))
    if isinstance(f, Quant):
        return Quant(f.kind, f.var, tilde(f.body, table))
    return f


def untilde(f: Formula, table: dict) -> Formula:
    """Inverse of tilde: table maps Fraction -> predicate name."""
    back = {name: Const(v) for v, name in table.items()}
    return map_atoms(f, back)
