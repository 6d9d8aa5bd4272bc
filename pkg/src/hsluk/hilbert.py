"""Hilbert-style calculi and their compilation into hypersequent proofs.

A proof is a list of lines, each a formula with a justification: an
axiom-schema instance, modus ponens from two earlier lines, or
generalization.  Four calculi share the machinery:

  HRP     axiom schemes L1-L4, tc1, tc2 and the quantifier schemes,
          rules (mp) and (gen);
  HL      HRP restricted to formulas without truth constants other
          than 0, with tc1/tc2 removed;
  HRPhat  HRP with closed instantiating terms in the (all1)/(ex1)
          schemes and (gen) replaced by (genhat), which infers
          (forall x A) from A[x/a] for a parameter a not in A;
  HLhat   the same restriction of HL.

hilbert_hat moves a proof into the hatted variant by closing every
line with fresh parameters; compile_hilbert turns a hatted proof into
a branch-style hypersequent proof of its last line, using cut for mp.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .calculi import (
    CalculusId,
    CheckReport,
    G3,
    ProofTree,
    RuleApplication,
    assert_checks,
    check,
    leaf,
    node,
    premises_of,
)
from .search import prove_bounded, prove_qf
from .syntax import (
    Atom,
    Const,
    Formula,
    Implies,
    NameSupply,
    Param,
    Quant,
    Var,
    Func,
    ZERO,
    free_for,
    free_vars,
    hs,
    is_closed_term,
    is_luk_formula,
    is_rpl_formula,
    is_sentence,
    occurs,
    seq,
    substitute,
    symbols_of,
)
from .transform import TransformError, subst_props_in_proof

HRP = CalculusId("HRP")
HL = CalculusId("HL")
HRPHAT = CalculusId("HRPhat")
HLHAT = CalculusId("HLhat")

_HATTED = ("HRPhat", "HLhat")
_LUK = ("HL", "HLhat")


# ----------------------------------------------------------- proof data


@dataclass(frozen=True)
class Ax:
    schema: str
    bindings: tuple = ()


@dataclass(frozen=True)
class MP:
    i: int  # line proving A
    j: int  # line proving A -> B


@dataclass(frozen=True)
class Gen:
    i: int
    var: str


@dataclass(frozen=True)
class GenHat:
    i: int
    var: str
    param: Param


@dataclass(frozen=True)
class HilbertLine:
    formula: Formula
    just: object


@dataclass(frozen=True)
class HilbertProof:
    lines: tuple

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1].formula


# ------------------------------------------------------ schema matching


def _match_inst(body: Formula, x: str, inst: Formula):
    """Find the term t with body[x/t] == inst, walking both formulas in
    parallel.  Returns a term, or None when the shapes disagree or the
    occurrences of x map to different terms."""
    found = []

    def terms(a, b) -> bool:
        if isinstance(a, Var) and a.name == x:
            found.append(b)
            return True
        if isinstance(a, Var) or isinstance(a, Param) or isinstance(a, Const):
            return a == b
        if isinstance(a, Func):
            return (
                isinstance(b, Func)
                and a.name == b.name
                and len(a.args) == len(b.args)
                and all(terms(p, q) for p, q in zip(a.args, b.args))
            )
        return False

    def go(a, b) -> bool:
        if isinstance(a, Atom):
            return (
                isinstance(b, Atom)
                and a.pred == b.pred
                and len(a.args) == len(b.args)
                and all(terms(p, q) for p, q in zip(a.args, b.args))
            )
        if isinstance(a, Implies):
            return (
                isinstance(b, Implies)
                and go(a.left, b.left)
                and go(a.right, b.right)
            )
        if isinstance(a, Quant):
            if not (
                isinstance(b, Quant) and a.kind == b.kind and a.var == b.var
            ):
                return False
            if a.var == x:  # x rebound: no substitution below
                return a.body == b.body
            return go(a.body, b.body)
        return a == b  # Const / SpVar

    if not go(body, inst):
        return None
    if not found:
        # x does not occur free: any closed term realizes the instance
        return ZERO_TERM
    t0 = found[0]
    if any(t != t0 for t in found[1:]):
        return None
    return t0


ZERO_TERM = Func("c0", ())


def _neg(f: Formula):
    if isinstance(f, Implies) and f.right == ZERO:
        return f.left
    return None


def match_axiom_schema(f: Formula, calc: CalculusId):
    """Return (schema id, bindings dict) for the first axiom scheme f
    instantiates in calc, or None."""
    luk = calc.base in _LUK
    hatted = calc.base in _HATTED
    formula_ok = is_luk_formula if luk else is_rpl_formula
    if not formula_ok(f):
        return None
    if isinstance(f, Implies):
        a, b = f.left, f.right
        # L1: A -> (B -> A)
        if isinstance(b, Implies) and b.right == a:
            return ("L1", {"A": a, "B": b.left})
        # L2: (A -> B) -> ((B -> C) -> (A -> C))
        if (
            isinstance(a, Implies)
            and isinstance(b, Implies)
            and isinstance(b.left, Implies)
            and isinstance(b.right, Implies)
            and b.left.left == a.right
            and b.right.left == a.left
            and b.left.right == b.right.right
        ):
            return ("L2", {"A": a.left, "B": a.right, "C": b.left.right})
        # L3: (~A -> ~B) -> (B -> A)
        if isinstance(a, Implies) and isinstance(b, Implies):
            na, nb = _neg(a.left), _neg(a.right)
            if (
                na is not None
                and nb is not None
                and na == b.right
                and nb == b.left
            ):
                return ("L3", {"A": na, "B": nb})
        # L4: ((A -> B) -> B) -> ((B -> A) -> A)
        if (
            isinstance(a, Implies)
            and isinstance(a.left, Implies)
            and isinstance(b, Implies)
            and isinstance(b.left, Implies)
            and a.left.right == a.right
            and b.left.right == b.right
            and a.left.left == b.right
            and b.left.left == a.right
        ):
            return ("L4", {"A": b.right, "B": a.right})
        # tc1: (r1 -> r2) -> r,  tc2: r -> (r1 -> r2),  r = min(1-r1+r2, 1)
        if not luk:
            if (
                isinstance(a, Implies)
                and isinstance(a.left, Const)
                and isinstance(a.right, Const)
                and isinstance(b, Const)
            ):
                r = min(1 - a.left.value + a.right.value, Fraction(1))
                if b.value == r:
                    return ("tc1", {"r1": a.left, "r2": a.right})
            if (
                isinstance(a, Const)
                and isinstance(b, Implies)
                and isinstance(b.left, Const)
                and isinstance(b.right, Const)
            ):
                r = min(1 - b.left.value + b.right.value, Fraction(1))
                if a.value == r:
                    return ("tc2", {"r1": b.left, "r2": b.right})
        # all1: forall x A -> A[x/t]
        if isinstance(a, Quant) and a.kind == "forall":
            t = _match_inst(a.body, a.var, b)
            if (
                t is not None
                and free_for(t, a.var, a.body)
                and (not hatted or is_closed_term(t))
            ):
                return ("all1", {"A": a.body, "x": a.var, "t": t})
        # ex1: A[x/t] -> exists x A
        if isinstance(b, Quant) and b.kind == "exists":
            t = _match_inst(b.body, b.var, a)
            if (
                t is not None
                and free_for(t, b.var, b.body)
                and (not hatted or is_closed_term(t))
            ):
                return ("ex1", {"A": b.body, "x": b.var, "t": t})
        # all2: forall x (A -> B) -> (A -> forall x B), x not free in A
        if (
            isinstance(a, Quant)
            and a.kind == "forall"
            and isinstance(a.body, Implies)
            and isinstance(b, Implies)
            and isinstance(b.right, Quant)
            and b.right.kind == "forall"
            and b.right.var == a.var
            and a.body.left == b.left
            and a.body.right == b.right.body
            and a.var not in free_vars(b.left)
        ):
            return ("all2", {"A": b.left, "B": b.right.body, "x": a.var})
        # ex2: forall x (A -> B) -> (exists x A -> B), x not free in B
        if (
            isinstance(a, Quant)
            and a.kind == "forall"
            and isinstance(a.body, Implies)
            and isinstance(b, Implies)
            and isinstance(b.left, Quant)
            and b.left.kind == "exists"
            and b.left.var == a.var
            and a.body.left == b.left.body
            and a.body.right == b.right
            and a.var not in free_vars(b.right)
        ):
            return ("ex2", {"A": b.left.body, "B": b.right, "x": a.var})
    return None


# ------------------------------------------------------------- checking


def check_hilbert(proof: HilbertProof, calc: CalculusId) -> CheckReport:
    """Verify a Hilbert-style proof line by line; the report names the
    first offending line by its index."""
    if calc.base not in ("HRP", "HL", "HRPhat", "HLhat"):
        return CheckReport(False, (), "not a Hilbert-style calculus")
    luk = calc.base in _LUK
    hatted = calc.base in _HATTED
    for n, line in enumerate(proof.lines):
        f, j = line.formula, line.just

        def bad(msg):
            return CheckReport(False, (n,), "line %d: %s" % (n, msg))

        if luk and not is_luk_formula(f):
            return bad("formula is outside the constant-free fragment")
        if not luk and not is_rpl_formula(f):
            return bad("formula is not in the language")
        if isinstance(j, Ax):
            m = match_axiom_schema(f, calc)
            if m is None:
                return bad("matches no axiom scheme")
            if j.schema and j.schema != m[0]:
                return bad(
                    "stated scheme %s, matched %s" % (j.schema, m[0])
                )
        elif isinstance(j, MP):
            if not (0 <= j.i < n and 0 <= j.j < n):
                return bad("mp premises must be earlier lines")
            major = proof.lines[j.j].formula
            if not (
                isinstance(major, Implies)
                and major.left == proof.lines[j.i].formula
                and major.right == f
            ):
                return bad("mp premises do not fit")
        elif isinstance(j, Gen):
            if hatted:
                return bad("gen is not a rule of the hatted calculus")
            if not (0 <= j.i < n):
                return bad("gen premise must be an earlier line")
            if f != Quant("forall", j.var, proof.lines[j.i].formula):
                return bad("gen conclusion does not fit")
        elif isinstance(j, GenHat):
            if not hatted:
                return bad("genhat only in the hatted calculi")
            if not (0 <= j.i < n):
                return bad("genhat premise must be an earlier line")
            if not (isinstance(f, Quant) and f.kind == "forall"):
                return bad("genhat concludes a universal formula")
            if f.var != j.var:
                return bad("genhat variable does not fit")
            if occurs(j.param, f.body):
                return bad("genhat parameter occurs in the formula")
            if proof.lines[j.i].formula != substitute(
                f.body, f.var, j.param
            ):
                return bad("genhat premise does not fit")
        else:
            return bad("unknown justification %r" % (j,))
    return CheckReport(True)


# -------------------------------------------- closing a proof with hats


def hilbert_hat(proof: HilbertProof, calc: CalculusId = HRP) -> HilbertProof:
    """Rebuild an HRP/HL proof of a sentence in the hatted calculus:
    every free variable is replaced by a distinct fresh parameter
    throughout, which closes all lines, turns open instantiating terms
    into closed ones and lets gen become genhat."""
    if calc.base not in ("HRP", "HL"):
        raise TransformError("hilbert_hat wants an unhatted calculus")
    if not is_sentence(proof.conclusion):
        raise TransformError("the conclusion must be a sentence")
    rep = check_hilbert(proof, calc)
    if not rep.ok:
        raise TransformError("input proof fails: %s" % (rep.message,))
    supply = NameSupply([ln.formula for ln in proof.lines])
    free = sorted({v for ln in proof.lines for v in free_vars(ln.formula)})
    pmap = {x: supply.fresh_param() for x in free}

    def close(f: Formula) -> Formula:
        for x, a in pmap.items():
            f = substitute(f, x, a)
        return f

    out = []
    for ln in proof.lines:
        j = ln.just
        if isinstance(j, Gen):
            j = GenHat(j.i, j.var, pmap.get(j.var, supply.fresh_param()))
        out.append(HilbertLine(close(ln.formula), j))
    hatted = HRPHAT if calc.base == "HRP" else HLHAT
    result = HilbertProof(tuple(out))
    rep = check_hilbert(result, hatted)
    if not rep.ok:
        raise TransformError("hatted proof fails: %s" % (rep.message,))
    return result


# ----------------------------------------- compiling into hypersequents


def _forward(concl, app, *kids) -> ProofTree:
    return node(concl, app, *kids)


def _prove_goal(goal, calc) -> ProofTree:
    d = prove_bounded(goal, calc)
    if d is None:
        raise TransformError("search failed on %s" % (goal,))
    return d


_SKELETONS = {
    "L1": (("A", "B"), lambda p: Implies(p["A"], Implies(p["B"], p["A"]))),
    "L2": (
        ("A", "B", "C"),
        lambda p: Implies(
            Implies(p["A"], p["B"]),
            Implies(Implies(p["B"], p["C"]), Implies(p["A"], p["C"])),
        ),
    ),
    "L3": (
        ("A", "B"),
        lambda p: Implies(
            Implies(Implies(p["A"], ZERO), Implies(p["B"], ZERO)),
            Implies(p["B"], p["A"]),
        ),
    ),
    "L4": (
        ("A", "B"),
        lambda p: Implies(
            Implies(Implies(p["A"], p["B"]), p["B"]),
            Implies(Implies(p["B"], p["A"]), p["A"]),
        ),
    ),
}


def _axiom_proof(
    f: Formula, schema: str, bind: dict, out_calc: CalculusId
) -> ProofTree:
    """A branch-style proof of (=> f) for an axiom instance."""
    if schema in _SKELETONS:
        keys, make = _SKELETONS[schema]
        supply = NameSupply([f])
        props = {k: Atom(supply.fresh_pred()) for k in keys}
        skel = make(props)
        d = prove_qf(hs(seq([], [skel])), G3)
        if d is None:
            raise TransformError("skeleton search failed for %s" % schema)
        return subst_props_in_proof(
            d, {props[k].pred: bind[k] for k in keys}, G3
        )
    if schema in ("tc1", "tc2"):
        d = prove_qf(hs(seq([], [f])), G3)
        if d is None:
            raise TransformError("truth-constant instance is unprovable")
        return d
    # quantifier schemes: peel the outer implication, search the rest
    concl = hs(seq([], [f]))
    app = RuleApplication("impl_right", comp=0, side="R", slot=0)
    p1, p2 = premises_of(G3, concl, app)
    return node(concl, app, leaf(p1), _prove_goal(p2, G3))


def compile_hilbert(
    proof: HilbertProof, calc: CalculusId = HRPHAT
) -> ProofTree:
    """Turn a hatted Hilbert proof into a branch-style hypersequent
    proof of (=> conclusion): axiom lines by skeleton search plus
    substitution (or direct search), mp by two cuts through the proved
    hypersequent (A, A -> B => B), genhat by the universal-right rule."""
    if calc.base not in _HATTED:
        raise TransformError("compile_hilbert wants a hatted calculus")
    rep = check_hilbert(proof, calc)
    if not rep.ok:
        raise TransformError("input proof fails: %s" % (rep.message,))
    luk = calc.base == "HLhat"
    cut_rule = "lcut" if luk else "cut"
    out_calc = G3.with_ext(cut_rule)

    done: list = []
    for n, ln in enumerate(proof.lines):
        f, j = ln.formula, ln.just
        if isinstance(j, Ax):
            schema, bind = match_axiom_schema(f, calc)
            d = _axiom_proof(f, schema, bind, out_calc)
        elif isinstance(j, MP):
            a = proof.lines[j.i].formula
            ab = proof.lines[j.j].formula
            b = ab.right
            core = _mp_core(a, b)
            mid = hs(seq([a], [b]))
            cut1 = node(
                mid,
                RuleApplication(
                    cut_rule,
                    comp=0,
                    formula=ab,
                    seq_a=seq([], []),
                    seq_b=seq([a], [b]),
                ),
                done[j.j],
                core,
            )
            d = node(
                hs(seq([], [b])),
                RuleApplication(
                    cut_rule,
                    comp=0,
                    formula=a,
                    seq_a=seq([], []),
                    seq_b=seq([], [b]),
                ),
                done[j.i],
                cut1,
            )
        elif isinstance(j, GenHat):
            d = node(
                hs(seq([], [f])),
                RuleApplication(
                    "all_right", comp=0, side="R", slot=0, param=j.param
                ),
                done[j.i],
            )
        else:
            raise TransformError("line %d: cannot compile %r" % (n, j))
        done.append(d)
    return assert_checks(done[-1], out_calc)


def _mp_core(a: Formula, b: Formula) -> ProofTree:
    """A branch-style proof of (A, A -> B => B), by searching the
    two-atom skeleton and substituting A and B back in."""
    supply = NameSupply([a, b])
    pa, pb = Atom(supply.fresh_pred()), Atom(supply.fresh_pred())
    skel = hs(seq([pa, Implies(pa, pb)], [pb]))
    d = prove_qf(skel, G3)
    if d is None:
        raise TransformError("modus ponens skeleton search failed")
    return subst_props_in_proof(d, {pa.pred: a, pb.pred: b}, G3)
