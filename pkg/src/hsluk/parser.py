"""Text format for terms, formulas, sequents and hypersequents.

    formula:  P(t, ...) | P | 0 | r(p/q) | f -> g | forall x. f
              | exists x. f | $0_k | $1_k | $2_k | (f)
    term:     x | #a | f(t, ...)
    sequent:  f, g => h      (either side may be empty)
    hyperseq: s | s | s

Implication associates to the right; a quantifier body extends as far
to the right as possible.  str() on the syntax classes produces this
format back, and parsing its own output is exact (rationals included).
"""

from __future__ import annotations

import re
from fractions import Fraction

from .syntax import (
    Atom,
    Const,
    Formula,
    Func,
    Hypersequent,
    Implies,
    Param,
    Quant,
    Sequent,
    SpVar,
    Term,
    Var,
)


class ParseError(ValueError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<turn>=>)|(?P<spvar>\$[012]_\d+)"
    r"|(?P<param>\#[A-Za-z_][A-Za-z0-9_]*)|(?P<num>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[(),.|/]))"
)


def _tokenize(text: str):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ParseError("bad input at %r" % rest[:20])
        pos = m.end()
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
    out.append(("eof", ""))
    return out


class _P:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind, value=None):
        k, v = self.next()
        if k != kind or (value is not None and v != value):
            raise ParseError("expected %s, got %r" % (value or kind, v))
        return v

    def at_sym(self, s):
        k, v = self.peek()
        return k == "sym" and v == s

    # terms

    def term(self) -> Term:
        k, v = self.next()
        if k == "param":
            return Param(v[1:])
        if k == "ident":
            if self.at_sym("("):
                return Func(v, self.term_args())
            return Var(v)
        raise ParseError("expected a term, got %r" % v)

    def term_args(self) -> tuple:
        self.expect("sym", "(")
        args = []
        if not self.at_sym(")"):
            args.append(self.term())
            while self.at_sym(","):
                self.next()
                args.append(self.term())
        self.expect("sym", ")")
        return tuple(args)

    # formulas

    def formula(self) -> Formula:
        left = self.formula_atomlike()
        if self.peek()[0] == "arrow":
            self.next()
            return Implies(left, self.formula())
        return left

    def formula_atomlike(self) -> Formula:
        k, v = self.peek()
        if k == "num":
            self.next()
            if v != "0":
                raise ParseError("bare number other than 0: %r" % v)
            return Const(Fraction(0))
        if k == "spvar":
            self.next()
            tag, idx = v[1:].split("_")
            return SpVar(int(tag), int(idx))
        if k == "sym" and v == "(":
            self.next()
            f = self.formula()
            self.expect("sym", ")")
            return f
        if k == "ident":
            if v in ("forall", "exists"):
                self.next()
                var = self.expect("ident")
                self.expect("sym", ".")
                return Quant(v, var, self.formula())
            if v == "r":
                save = self.i
                self.next()
                if self.at_sym("("):
                    self.next()
                    num = int(self.expect("num"))
                    self.expect("sym", "/")
                    den = int(self.expect("num"))
                    self.expect("sym", ")")
                    q = Fraction(num, den)
                    if q.numerator != num or q.denominator != den:
                        raise ParseError(
                            "rational not in lowest terms: %d/%d" % (num, den)
                        )
                    return Const(q)
                self.i = save
            self.next()
            if self.at_sym("("):
                return Atom(v, self.term_args())
            return Atom(v)
        raise ParseError("expected a formula, got %r" % v)

    def formula_list(self, stop_kinds) -> tuple:
        out = []
        if self.peek()[0] in stop_kinds:
            return ()
        out.append(self.formula())
        while self.at_sym(","):
            self.next()
            out.append(self.formula())
        return tuple(out)

    def sequent(self) -> Sequent:
        ant = self.formula_list(("turn",))
        self.expect("turn")
        suc = self.formula_list(("eof",))
        # a "|" ends the succedent when parsing a hypersequent
        return Sequent(ant, suc)

    def hyper_sequent(self) -> Hypersequent:
        comps = [self._hs_component()]
        while self.at_sym("|"):
            self.next()
            comps.append(self._hs_component())
        return Hypersequent(tuple(comps))

    def _hs_component(self) -> Sequent:
        ant = self.formula_list(("turn",))
        self.expect("turn")
        suc = []
        while not (self.peek()[0] == "eof" or self.at_sym("|")):
            suc.append(self.formula())
            if self.at_sym(","):
                self.next()
            else:
                break
        return Sequent(tuple(ant), tuple(suc))

    def done(self):
        if self.peek()[0] != "eof":
            raise ParseError("trailing input: %r" % (self.peek()[1],))


def parse_term(text: str) -> Term:
    p = _P(text)
    t = p.term()
    p.done()
    return t


def parse_formula(text: str) -> Formula:
    p = _P(text)
    f = p.formula()
    p.done()
    return f


def parse_sequent(text: str) -> Sequent:
    p = _P(text)
    # reuse the hypersequent component parser so "|" is rejected cleanly
    s = p._hs_component()
    p.done()
    return s


def parse_hypersequent(text: str) -> Hypersequent:
    p = _P(text)
    h = p.hyper_sequent()
    p.done()
    return h
