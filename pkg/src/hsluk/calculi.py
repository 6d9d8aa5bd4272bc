"""Hypersequent calculi: rule schemas, proof trees and the checker.

Bases:

  GL / GaL    non-cumulative rules, schematic axioms (id), (=>), (0 =>);
              GaL restricts (id) and (0 =>) to atomic formulas.
  G0          cumulative rules: every premise repeats the conclusion and
              appends new components.
  G1hat / G1  G0 with the implication-left rule replaced by the variant
              that introduces a fresh type-1 spvar; G1 additionally bans
              type-0 spvars from every node.
  G3          non-cumulative spvar rules.

Axioms of G0/G1hat/G1/G3 are the hypersequents whose atomic part is
valid (decided by lindec).  Extensions add cut/ccan (RPL formulas),
lcut/lccan (Lukasiewicz formulas) and the density rules den0/den1/den.

A rule application names its conclusion data (principal component,
formula position, proper datum, partitions); the premises are then
synthesized and compared with the children up to multiset equality, so
component order inside a stored proof never matters.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import lindec
from .syntax import (
    Atom,
    Const,
    Formula,
    Hypersequent,
    Implies,
    Param,
    Quant,
    Sequent,
    SpVar,
    Term,
    ZERO,
    is_atomic,
    is_closed_term,
    is_luk_formula,
    is_rpl_formula,
    merge,
    occurs,
    substitute,
)

BASES = ("GL", "GaL", "G0", "G1hat", "G1", "G3")
HILBERT_BASES = ("HRP", "HL", "HRPhat", "HLhat")
EXTENSIONS = ("cut", "lcut", "ccan", "lccan", "den0", "den1", "den")

LOGICAL_RULES = (
    "impl_left",
    "impl_right",
    "all_left",
    "all_right",
    "ex_left",
    "ex_right",
)
STRUCTURAL_RULES = ("ew", "ec", "wl", "split", "mix")


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class CalculusId:
    base: str
    extensions: frozenset = frozenset()

    def __post_init__(self):
        if self.base not in BASES + HILBERT_BASES:
            raise ValueError("unknown base calculus %r" % (self.base,))
        object.__setattr__(self, "extensions", frozenset(self.extensions))
        for e in self.extensions:
            if e not in EXTENSIONS:
                raise ValueError("unknown extension %r" % (e,))
        if self.extensions and self.base in HILBERT_BASES:
            raise ValueError("Hilbert calculi take no extensions")

    def __str__(self):
        return "+".join([self.base] + sorted(self.extensions))

    @staticmethod
    def parse(text: str) -> "CalculusId":
        parts = text.split("+")
        return CalculusId(parts[0], frozenset(parts[1:]))

    def with_ext(self, *exts: str) -> "CalculusId":
        return CalculusId(self.base, self.extensions | set(exts))

    def rules(self) -> tuple:
        out = list(LOGICAL_RULES)
        if self.base in ("GL", "GaL"):
            out += list(STRUCTURAL_RULES)
        out += sorted(self.extensions)
        return tuple(out)


GL = CalculusId("GL")
GAL = CalculusId("GaL")
G0 = CalculusId("G0")
G1HAT = CalculusId("G1hat")
G1 = CalculusId("G1")
G3 = CalculusId("G3")


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    comp: int = 0
    side: str | None = None
    slot: int | None = None
    comp2: int | None = None
    term: Term | None = None
    param: Param | None = None
    spvar: SpVar | None = None
    formula: Formula | None = None
    seq_a: Sequent | None = None
    seq_b: Sequent | None = None


@dataclass(frozen=True)
class ProofTree:
    root: Hypersequent
    app: RuleApplication | None = None  # None marks an axiom leaf
    children: tuple = ()

    def height(self) -> int:
        if not self.children:
            return 0
        return 1 + max(c.height() for c in self.children)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def leaves(self):
        if not self.children:
            yield self
        else:
            for c in self.children:
                yield from c.leaves()

    def rule_counts(self) -> dict:
        out: dict = {}

        def go(n):
            key = n.app.rule if n.app else "axiom"
            out[key] = out.get(key, 0) + 1
            for c in n.children:
                go(c)

        go(self)
        return out


def leaf(h: Hypersequent) -> ProofTree:
    return ProofTree(h)


def node(h: Hypersequent, app: RuleApplication, *children: ProofTree) -> ProofTree:
    return ProofTree(h, app, tuple(children))


# --------------------------------------------------------- language


def formula_ok(calc: CalculusId, f: Formula) -> str | None:
    base = calc.base
    if base in ("GL", "GaL"):
        if not is_luk_formula(f):
            return "formula %s is not a Lukasiewicz formula" % (f,)
        return None

    def bad_spvar(g) -> SpVar | None:
        if isinstance(g, SpVar):
            if g.tag == 2 and "den" not in calc.extensions:
                return g
            if g.tag == 0 and base == "G1":
                return g
            return None
        if isinstance(g, Implies):
            return bad_spvar(g.left) or bad_spvar(g.right)
        if isinstance(g, Quant):
            return bad_spvar(g.body)
        return None

    v = bad_spvar(f)
    if v is not None:
        return "spvar %s not allowed in %s" % (v, calc)
    return None


def language_ok(calc: CalculusId, h: Hypersequent) -> str | None:
    for f in h.formulas():
        err = formula_ok(calc, f)
        if err:
            return err
    return None


# ----------------------------------------------------------- axioms


def is_axiom(calc: CalculusId, h: Hypersequent, engine: str = "both") -> bool:
    if calc.base in ("GL", "GaL"):
        if len(h.comps) != 1:
            return False
        s = h.comps[0]
        if not s.ant and not s.suc:
            return True
        if len(s.suc) == 1:
            a = s.suc[0]
            if calc.base == "GaL" and not is_atomic(a):
                return False
            if s.ant == (a,) or s.ant == (ZERO,):
                return True
        return False
    return lindec.is_axiom(h, engine)


# ------------------------------------------------- premise synthesis


def _need(cond: bool, msg: str):
    if not cond:
        raise RuleError(msg)


def _principal(concl: Hypersequent, app: RuleApplication):
    _need(0 <= app.comp < len(concl.comps), "principal component out of range")
    s = concl.comps[app.comp]
    _need(app.side in ("L", "R"), "missing principal side")
    row = s.ant if app.side == "L" else s.suc
    _need(
        app.slot is not None and 0 <= app.slot < len(row),
        "principal slot out of range",
    )
    return s, s.at(app.side, app.slot)


def _fresh_param(app: RuleApplication, concl: Hypersequent) -> Param:
    _need(app.param is not None, "rule needs a proper parameter")
    _need(
        not occurs(app.param, concl),
        "proper parameter %s occurs in the conclusion" % (app.param,),
    )
    return app.param


def _fresh_spvar(app, concl, tag: int) -> SpVar:
    _need(app.spvar is not None, "rule needs a proper spvar")
    _need(app.spvar.tag == tag, "proper spvar must have type %d" % tag)
    _need(
        not occurs(app.spvar, concl),
        "proper spvar %s occurs in the conclusion" % (app.spvar,),
    )
    return app.spvar


def _proper_term(app) -> Term:
    _need(app.term is not None, "rule needs a proper term")
    _need(is_closed_term(app.term), "proper term must be closed")
    return app.term


def _quant(f: Formula, kind: str) -> Quant:
    _need(isinstance(f, Quant) and f.kind == kind, "principal formula is not %s" % kind)
    return f


def _impl(f: Formula) -> Implies:
    _need(isinstance(f, Implies), "principal formula is not an implication")
    return f


def premises_of(
    calc: CalculusId, concl: Hypersequent, app: RuleApplication
) -> list:
    """Synthesize premise hypersequents; raises RuleError when the
    application does not instantiate a rule of calc on concl."""
    r = app.rule
    base = calc.base
    if r in LOGICAL_RULES:
        if base in ("G0", "G1hat", "G1"):
            return _premises_cumulative(calc, concl, app)
        if base == "G3":
            return _premises_g3(concl, app)
        if base in ("GL", "GaL"):
            return _premises_gl(concl, app)
        raise RuleError("logical rules need a hypersequent calculus")
    if r in STRUCTURAL_RULES:
        _need(base in ("GL", "GaL"), "structural rule %s only in GL/GaL" % r)
        return _premises_structural(concl, app)
    if r in ("cut", "lcut"):
        _need(r in calc.extensions, "%s not enabled in %s" % (r, calc))
        return _premises_cut(concl, app, r)
    if r in ("ccan", "lccan"):
        _need(r in calc.extensions, "%s not enabled in %s" % (r, calc))
        return _premises_ccan(concl, app, r)
    if r in ("den0", "den1", "den"):
        _need(r in calc.extensions, "%s not enabled in %s" % (r, calc))
        return _premises_den(concl, app, r)
    raise RuleError("unknown rule %r" % (r,))


def _premises_cumulative(calc, concl, app):
    s, f = _principal(concl, app)
    i = app.comp
    r = app.rule
    if r == "impl_left":
        _need(app.side == "L", "impl_left acts on the antecedent")
        f = _impl(f)
        base_seq = s.without("L", app.slot)
        if calc.base in ("G1hat", "G1"):
            sp = _fresh_spvar(app, concl, 1)
            e1 = base_seq.extended(ant=[sp])
            e2 = Sequent((f.right,), (sp, f.left))
        else:
            e1 = base_seq
            e2 = base_seq.extended(ant=[f.right], suc=[f.left])
        return [concl.extended(e1, e2)]
    if r == "impl_right":
        _need(app.side == "R", "impl_right acts on the succedent")
        f = _impl(f)
        base_seq = s.without("R", app.slot)
        return [
            concl.extended(base_seq),
            concl.extended(base_seq.extended(ant=[f.left], suc=[f.right])),
        ]
    if r == "all_left":
        _need(app.side == "L", "all_left acts on the antecedent")
        q = _quant(f, "forall")
        inst = substitute(q.body, q.var, _proper_term(app))
        return [concl.extended(s.replaced("L", app.slot, inst))]
    if r == "all_right":
        _need(app.side == "R", "all_right acts on the succedent")
        q = _quant(f, "forall")
        a = _fresh_param(app, concl)
        return [concl.extended(s.replaced("R", app.slot, substitute(q.body, q.var, a)))]
    if r == "ex_right":
        _need(app.side == "R", "ex_right acts on the succedent")
        q = _quant(f, "exists")
        inst = substitute(q.body, q.var, _proper_term(app))
        return [concl.extended(s.replaced("R", app.slot, inst))]
    if r == "ex_left":
        _need(app.side == "L", "ex_left acts on the antecedent")
        q = _quant(f, "exists")
        a = _fresh_param(app, concl)
        return [concl.extended(s.replaced("L", app.slot, substitute(q.body, q.var, a)))]
    raise RuleError("unknown logical rule %r" % (r,))


def _premises_g3(concl, app):
    s, f = _principal(concl, app)
    i = app.comp
    r = app.rule
    if r == "impl_left":
        _need(app.side == "L", "impl_left acts on the antecedent")
        f = _impl(f)
        sp = _fresh_spvar(app, concl, 1)
        e1 = s.without("L", app.slot).extended(ant=[sp])
        e2 = Sequent((f.right,), (sp, f.left))
        return [concl.replaced(i, e1).extended(e2)]
    if r == "impl_right":
        _need(app.side == "R", "impl_right acts on the succedent")
        f = _impl(f)
        base_seq = s.without("R", app.slot)
        return [
            concl.replaced(i, base_seq),
            concl.replaced(i, base_seq.extended(ant=[f.left], suc=[f.right])),
        ]
    if r == "all_left":
        _need(app.side == "L", "all_left acts on the antecedent")
        q = _quant(f, "forall")
        sp = _fresh_spvar(app, concl, 1)
        inst = substitute(q.body, q.var, _proper_term(app))
        return [
            concl.replaced(i, s.without("L", app.slot).extended(ant=[sp]))
            .extended(Sequent((f,), (sp,)), Sequent((inst,), (sp,)))
        ]
    if r == "all_right":
        _need(app.side == "R", "all_right acts on the succedent")
        q = _quant(f, "forall")
        a = _fresh_param(app, concl)
        return [concl.replaced(i, s.replaced("R", app.slot, substitute(q.body, q.var, a)))]
    if r == "ex_right":
        _need(app.side == "R", "ex_right acts on the succedent")
        q = _quant(f, "exists")
        sp = _fresh_spvar(app, concl, 0)
        inst = substitute(q.body, q.var, _proper_term(app))
        return [
            concl.replaced(i, s.without("R", app.slot).extended(suc=[sp]))
            .extended(Sequent((sp,), (f,)), Sequent((sp,), (inst,)))
        ]
    if r == "ex_left":
        _need(app.side == "L", "ex_left acts on the antecedent")
        q = _quant(f, "exists")
        a = _fresh_param(app, concl)
        return [concl.replaced(i, s.replaced("L", app.slot, substitute(q.body, q.var, a)))]
    raise RuleError("unknown logical rule %r" % (r,))


def _premises_gl(concl, app):
    s, f = _principal(concl, app)
    i = app.comp
    r = app.rule
    if r == "impl_left":
        _need(app.side == "L", "impl_left acts on the antecedent")
        f = _impl(f)
        return [
            concl.replaced(
                i, s.without("L", app.slot).extended(ant=[f.right], suc=[f.left])
            )
        ]
    if r == "impl_right":
        _need(app.side == "R", "impl_right acts on the succedent")
        f = _impl(f)
        base_seq = s.without("R", app.slot)
        return [
            concl.replaced(i, base_seq),
            concl.replaced(i, base_seq.extended(ant=[f.left], suc=[f.right])),
        ]
    if r == "all_left":
        _need(app.side == "L", "all_left acts on the antecedent")
        q = _quant(f, "forall")
        inst = substitute(q.body, q.var, _proper_term(app))
        return [concl.replaced(i, s.replaced("L", app.slot, inst))]
    if r == "all_right":
        _need(app.side == "R", "all_right acts on the succedent")
        q = _quant(f, "forall")
        a = _fresh_param(app, concl)
        return [concl.replaced(i, s.replaced("R", app.slot, substitute(q.body, q.var, a)))]
    if r == "ex_right":
        _need(app.side == "R", "ex_right acts on the succedent")
        q = _quant(f, "exists")
        inst = substitute(q.body, q.var, _proper_term(app))
        return [concl.replaced(i, s.replaced("R", app.slot, inst))]
    if r == "ex_left":
        _need(app.side == "L", "ex_left acts on the antecedent")
        q = _quant(f, "exists")
        a = _fresh_param(app, concl)
        return [concl.replaced(i, s.replaced("L", app.slot, substitute(q.body, q.var, a)))]
    raise RuleError("unknown logical rule %r" % (r,))


def _premises_structural(concl, app):
    r = app.rule
    i = app.comp
    _need(0 <= i < len(concl.comps), "principal component out of range")
    s = concl.comps[i]
    if r == "ew":
        return [concl.without(i)]
    if r == "ec":
        return [concl.extended(s)]
    if r == "wl":
        _need(app.side == "L", "wl removes an antecedent formula")
        _need(
            app.slot is not None and 0 <= app.slot < len(s.ant),
            "wl slot out of range",
        )
        return [concl.replaced(i, s.without("L", app.slot))]
    if r == "split":
        j = app.comp2
        _need(
            j is not None and 0 <= j < len(concl.comps) and j != i,
            "split needs a distinct second component",
        )
        t = concl.comps[j]
        lo, hi = sorted((i, j))
        comps = list(concl.comps)
        comps[lo] = merge(concl.comps[lo], concl.comps[hi])
        del comps[hi]
        return [Hypersequent(tuple(comps))]
    if r == "mix":
        _need(
            app.seq_a is not None and app.seq_b is not None,
            "mix needs the two parts",
        )
        _need(
            merge(app.seq_a, app.seq_b) == s,
            "mix parts do not recombine to the principal component",
        )
        return [concl.replaced(i, app.seq_a), concl.replaced(i, app.seq_b)]
    raise RuleError("unknown structural rule %r" % (r,))


def _premises_cut(concl, app, r):
    i = app.comp
    _need(0 <= i < len(concl.comps), "principal component out of range")
    s = concl.comps[i]
    c = app.formula
    _need(c is not None, "cut needs its cut formula")
    if r == "cut":
        _need(is_rpl_formula(c), "cut formula must be an RPL formula")
    else:
        _need(is_luk_formula(c), "lcut formula must be a Lukasiewicz formula")
    _need(
        app.seq_a is not None and app.seq_b is not None,
        "cut needs the two parts",
    )
    _need(
        merge(app.seq_a, app.seq_b) == s,
        "cut parts do not recombine to the principal component",
    )
    return [
        concl.replaced(i, app.seq_a.extended(suc=[c])),
        concl.replaced(i, app.seq_b.extended(ant=[c])),
    ]


def _premises_ccan(concl, app, r):
    i = app.comp
    _need(0 <= i < len(concl.comps), "principal component out of range")
    s = concl.comps[i]
    c = app.formula
    _need(c is not None, "ccan needs its formula")
    if r == "ccan":
        _need(is_rpl_formula(c), "ccan formula must be an RPL formula")
    else:
        _need(is_luk_formula(c), "lccan formula must be a Lukasiewicz formula")
    return [concl.extended(s.extended(ant=[c], suc=[c]))]


def _premises_den(concl, app, r):
    i = app.comp
    _need(0 <= i < len(concl.comps), "principal component out of range")
    s = concl.comps[i]
    if r == "den1":
        _need(app.side == "L", "den1 moves an antecedent formula")
        _need(
            app.slot is not None and 0 <= app.slot < len(s.ant),
            "den1 slot out of range",
        )
        c = s.ant[app.slot]
        sp = _fresh_spvar(app, concl, 1)
        return [
            concl.replaced(i, s.without("L", app.slot).extended(ant=[sp]))
            .extended(Sequent((c,), (sp,)))
        ]
    if r == "den0":
        _need(app.side == "R", "den0 moves a succedent formula")
        _need(
            app.slot is not None and 0 <= app.slot < len(s.suc),
            "den0 slot out of range",
        )
        c = s.suc[app.slot]
        sp = _fresh_spvar(app, concl, 0)
        return [
            concl.replaced(i, s.without("R", app.slot).extended(suc=[sp]))
            .extended(Sequent((sp,), (c,)))
        ]
    # r == "den": special variable, arbitrary two-part split
    _need(
        app.seq_a is not None and app.seq_b is not None,
        "den needs the two parts",
    )
    _need(
        merge(app.seq_a, app.seq_b) == s,
        "den parts do not recombine to the principal component",
    )
    sp = _fresh_spvar(app, concl, 2)
    return [
        concl.replaced(i, app.seq_a.extended(ant=[sp]))
        .extended(Sequent(app.seq_b.ant, (sp,) + app.seq_b.suc))
    ]


# ---------------------------------------------------------- checking


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    path: tuple = ()
    message: str = ""

    def __bool__(self):
        return self.ok


def check(proof: ProofTree, calc: CalculusId) -> CheckReport:
    """Verify a proof tree node by node.  On failure the report names
    the first offending node by its child-index path from the root."""

    def go(n: ProofTree, path: tuple) -> CheckReport:
        err = language_ok(calc, n.root)
        if err:
            return CheckReport(False, path, err)
        if n.app is None:
            if not n.children and is_axiom(calc, n.root):
                return CheckReport(True)
            return CheckReport(False, path, "leaf is not an axiom")
        try:
            prems = premises_of(calc, n.root, n.app)
        except RuleError as e:
            return CheckReport(False, path, str(e))
        if len(prems) != len(n.children):
            return CheckReport(
                False,
                path,
                "rule %s needs %d premises, found %d"
                % (n.app.rule, len(prems), len(n.children)),
            )
        for k, (p, c) in enumerate(zip(prems, n.children)):
            if p != c.root:
                return CheckReport(
                    False,
                    path + (k,),
                    "premise mismatch for %s: expected %s, found %s"
                    % (n.app.rule, p, c.root),
                )
            rep = go(c, path + (k,))
            if not rep.ok:
                return rep
        return CheckReport(True)

    return go(proof, ())


def apply_backward(
    calc: CalculusId, goal: Hypersequent, app: RuleApplication
) -> list:
    """Premises that would prove goal by app; RuleError if ill-formed."""
    return premises_of(calc, goal, app)


def assert_checks(proof: ProofTree, calc: CalculusId) -> ProofTree:
    rep = check(proof, calc)
    if not rep.ok:
        raise AssertionError(
            "internal proof fails to check in %s at %s: %s"
            % (calc, rep.path, rep.message)
        )
    return proof
