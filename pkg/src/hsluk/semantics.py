"""Many-valued semantics over finite domains.

Formula values live in [0,1]; "x -> y" takes min(1 - x + y, 1) and
"forall"/"exists" take min/max over the domain.  A
sequent (G => D) is true when sum(|A| - 1 for A in G) <= the same sum
over D; a hypersequent is true when some component is.  Type-0 spvars
range over [0, +inf), type-1 over (-inf, 1], special ones over all
rationals.  Finite domains are complete for validity checking of the
atomic hypersequents this package decides exactly; for general formulas
falsification is a sound (if incomplete) sampling procedure.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
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
    free_vars,
)


@dataclass
class HsInterpretation:
    """A finite interpretation: domain {0, ..., size-1} plus tables."""

    size: int = 1
    preds: dict = field(default_factory=dict)  # name -> {tuple: Fraction}
    funcs: dict = field(default_factory=dict)  # name -> {tuple: int}
    params: dict = field(default_factory=dict)  # name -> int
    spvars: dict = field(default_factory=dict)  # (tag, idx) -> Fraction

    def pred_value(self, name: str, args: tuple) -> Fraction:
        return self.preds.get(name, {}).get(args, Fraction(0))

    def func_value(self, name: str, args: tuple) -> int:
        return self.funcs.get(name, {}).get(args, 0)

    def param_value(self, name: str) -> int:
        return self.params.get(name, 0)

    def spvar_value(self, tag: int, idx: int) -> Fraction:
        if (tag, idx) in self.spvars:
            return self.spvars[(tag, idx)]
        return Fraction(1) if tag == 1 else Fraction(0)


def eval_term(t: Term, m: HsInterpretation, nu: dict) -> int:
    if isinstance(t, Var):
        if t.name not in nu:
            raise ValueError("unbound variable %s" % t.name)
        return nu[t.name]
    if isinstance(t, Param):
        return m.param_value(t.name)
    return m.func_value(t.name, tuple(eval_term(a, m, nu) for a in t.args))


def eval_formula(f: Formula, m: HsInterpretation, nu: dict) -> Fraction:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, SpVar):
        return m.spvar_value(f.tag, f.index)
    if isinstance(f, Atom):
        return m.pred_value(
            f.pred, tuple(eval_term(a, m, nu) for a in f.args)
        )
    if isinstance(f, Implies):
        x = eval_formula(f.left, m, nu)
        y = eval_formula(f.right, m, nu)
        return min(1 - x + y, Fraction(1))
    if isinstance(f, Quant):
        vals = []
        for d in range(m.size):
            nu2 = dict(nu)
            nu2[f.var] = d
            vals.append(eval_formula(f.body, m, nu2))
        return min(vals) if f.kind == "forall" else max(vals)
    raise TypeError("not a formula: %r" % (f,))


def side_value(formulas, m: HsInterpretation, nu: dict) -> Fraction:
    return sum(
        (eval_formula(f, m, nu) - 1 for f in formulas), start=Fraction(0)
    )


def seq_is_true(s: Sequent, m: HsInterpretation, nu: dict) -> bool:
    return side_value(s.ant, m, nu) <= side_value(s.suc, m, nu)


def hs_is_true(h: Hypersequent, m: HsInterpretation, nu: dict) -> bool:
    return any(seq_is_true(s, m, nu) for s in h.comps)


def is_valid_on(h: Hypersequent, m: HsInterpretation) -> bool:
    """True iff h holds under every valuation of its free variables."""
    fv = sorted(set().union(*(free_vars(f) for f in h.formulas()), set()))
    for point in itertools.product(range(m.size), repeat=len(fv)):
        if not hs_is_true(h, m, dict(zip(fv, point))):
            return False
    return True


# ----------------------------------------------------------- signature


def _collect(h: Hypersequent):
    preds, funcs, params, spvars = {}, {}, set(), set()

    def term(t):
        if isinstance(t, Param):
            params.add(t.name)
        elif isinstance(t, Func):
            funcs[(t.name, len(t.args))] = True
            for a in t.args:
                term(a)

    def form(f):
        if isinstance(f, Atom):
            preds[(f.pred, len(f.args))] = True
            for a in f.args:
                term(a)
        elif isinstance(f, SpVar):
            spvars.add((f.tag, f.index))
        elif isinstance(f, Implies):
            form(f.left)
            form(f.right)
        elif isinstance(f, Quant):
            form(f.body)

    for f in h.formulas():
        form(f)
    return preds, funcs, params, spvars


_GRID = [Fraction(k, 8) for k in range(9)]


def _rand_spvar(tag: int, rng: random.Random) -> Fraction:
    if tag == 0:
        return Fraction(rng.randrange(0, 17), 4)  # [0, 4]
    if tag == 1:
        return Fraction(rng.randrange(-12, 5), 4)  # [-3, 1]
    return Fraction(rng.randrange(-12, 17), 4)  # [-3, 4]


def random_interpretation(
    h: Hypersequent, rng: random.Random, max_domain: int = 3
) -> HsInterpretation:
    preds, funcs, params, spvars = _collect(h)
    size = rng.randrange(1, max_domain + 1)
    m = HsInterpretation(size=size)
    for (name, ar) in preds:
        tbl = m.preds.setdefault(name, {})
        for args in itertools.product(range(size), repeat=ar):
            tbl[args] = rng.choice(_GRID)
    for (name, ar) in funcs:
        tbl = m.funcs.setdefault(name, {})
        for args in itertools.product(range(size), repeat=ar):
            tbl[args] = rng.randrange(size)
    for name in params:
        m.params[name] = rng.randrange(size)
    for tag, idx in spvars:
        m.spvars[(tag, idx)] = _rand_spvar(tag, rng)
    return m


def falsify(
    h: Hypersequent,
    seed: int = 0,
    trials: int = 200,
    max_domain: int = 3,
) -> HsInterpretation | None:
    """Search for a falsifying interpretation by seeded random sampling.

    Returns the first interpretation under which h fails, or None.  A
    None answer does not certify validity except on atomic input, where
    lindec should be used instead anyway.
    """
    rng = random.Random(seed)
    for _ in range(trials):
        m = random_interpretation(h, rng, max_domain)
        if not is_valid_on(h, m):
            return m
    return None
