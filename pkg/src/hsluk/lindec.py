"""Exact validity decision for atomic hypersequents.

An atomic hypersequent fails iff some interpretation makes every
component false, i.e. makes sum(v_A - 1, A in ant) - sum(v_A - 1, A in
suc) > 0 for each component, with every predicate atom in [0,1], type-0
spvars in [0,inf), type-1 in (-inf,1] and special spvars unbounded.
Distinct atoms (syntactically distinct predicate applications) are
independent variables; that is exact because any value table can be
realized over the term model.

The negation system is decided twice, by Fourier-Motzkin elimination
and by an exact two-phase simplex, both over Fraction.  Agreement is
asserted on every call.  The answer carries a replayable certificate:
a satisfying point, or nonnegative multipliers combining the
constraints into an absurdity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .semantics import HsInterpretation
from .syntax import (
    Atom,
    Const,
    Formula,
    Func,
    Hypersequent,
    Param,
    Sequent,
    SpVar,
    Term,
    Var,
    atomic_part,
)

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class LinConstraint:
    """sum(coeffs[v] * v) + const >= 0, strictly when strict is set."""

    coeffs: tuple  # sorted tuple of (var_key, Fraction)
    const: Fraction
    strict: bool
    origin: tuple  # ("comp", i) or ("bound", var_key, "lo"/"hi")

    def coeff_map(self) -> dict:
        return dict(self.coeffs)

    def eval_at(self, point: dict) -> Fraction:
        return sum(
            (c * point.get(v, ZERO) for v, c in self.coeffs), start=ZERO
        ) + self.const

    def holds_at(self, point: dict) -> bool:
        val = self.eval_at(point)
        return val > 0 if self.strict else val >= 0


def _mk(coeffs: dict, const: Fraction, strict: bool, origin) -> LinConstraint:
    items = tuple(
        sorted(((v, c) for v, c in coeffs.items() if c != 0), key=lambda p: str(p[0]))
    )
    return LinConstraint(items, Fraction(const), strict, origin)


@dataclass(frozen=True)
class Witness:
    point: tuple  # sorted tuple of (var_key, Fraction)

    def as_dict(self) -> dict:
        return dict(self.point)


@dataclass(frozen=True)
class Infeasible:
    multipliers: tuple  # tuple of (constraint_index, Fraction), all > 0


Certificate = Witness | Infeasible

# ------------------------------------------------------ system building


def _var_bounds(v: Formula):
    """(lower, upper) bounds for a variable, None for unbounded sides."""
    if isinstance(v, Atom):
        return ZERO, ONE
    if isinstance(v, SpVar):
        if v.tag == 0:
            return ZERO, None
        if v.tag == 1:
            return None, ONE
        return None, None
    raise TypeError("not an atomic variable: %r" % (v,))


def negation_system(h: Hypersequent) -> list:
    """Strict system expressing 'every component of h is false'.

    h must be atomic.  Includes the range bounds of every variable.
    Infeasibility of the result is exactly validity of h.
    """
    variables = {}
    out = []
    for i, s in enumerate(h.comps):
        if not s.is_atomic():
            raise ValueError("negation_system wants an atomic hypersequent")
        coeffs: dict = {}
        const = ZERO
        for f in s.ant:
            if isinstance(f, Const):
                const += f.value - 1
            else:
                coeffs[f] = coeffs.get(f, ZERO) + 1
                const -= 1
                variables[f] = True
        for f in s.suc:
            if isinstance(f, Const):
                const -= f.value - 1
            else:
                coeffs[f] = coeffs.get(f, ZERO) - 1
                const += 1
                variables[f] = True
        out.append(_mk(coeffs, const, True, ("comp", i)))
    for v in variables:
        lo, hi = _var_bounds(v)
        if lo is not None:
            out.append(_mk({v: ONE}, -lo, False, ("bound", v, "lo")))
        if hi is not None:
            out.append(_mk({v: -ONE}, hi, False, ("bound", v, "hi")))
    return out


def system_variables(constraints) -> list:
    seen = {}
    for c in constraints:
        for v, _ in c.coeffs:
            seen[v] = True
    return sorted(seen, key=str)


# ------------------------------------------------------ Fourier-Motzkin


def fm_decide(constraints):
    """("witness", point_dict) or ("infeasible", combo_dict).

    combo maps original constraint indexes to positive rationals whose
    combination has no variables, and either a negative constant or a
    zero constant with some strict constraint involved.
    """
    # working rows: (coeffs dict, const, strict, combo dict)
    rows = [
        (c.coeff_map(), c.const, c.strict, {i: ONE})
        for i, c in enumerate(constraints)
    ]

    def dedup(rows):
        # keep only the tightest row per coefficient direction: after
        # scaling, a smaller constant implies the larger and strict
        # implies non-strict
        best = {}
        for r in rows:
            items = sorted(((str(v), c) for v, c in r[0].items()))
            scale = abs(items[0][1]) if items else ONE
            key = tuple((v, c / scale) for v, c in items)
            rank = (r[1] / scale, not r[2])
            cur = best.get(key)
            if cur is None or rank < cur[0]:
                best[key] = (rank, r)
        return [r for _, r in best.values()]
    rows = dedup(rows)
    order = list(system_variables(constraints))
    stages = []  # (var, rows mentioning it) for back substitution
    while order:
        # eliminate the variable producing the fewest new rows
        def cost(v):
            p = sum(1 for r in rows if r[0].get(v, ZERO) > 0)
            n = sum(1 for r in rows if r[0].get(v, ZERO) < 0)
            return p * n - p - n
        v = min(order, key=cost)
        order.remove(v)
        keep, pos, neg = [], [], []
        for r in rows:
            a = r[0].get(v, ZERO)
            if a > 0:
                pos.append(r)
            elif a < 0:
                neg.append(r)
            else:
                keep.append(r)
        stages.append((v, pos + neg))
        new = keep
        for rp in pos:
            ap = rp[0][v]
            for rn in neg:
                an = -rn[0][v]
                # an * rp + ap * rn eliminates v
                coeffs = {}
                for w, c in rp[0].items():
                    coeffs[w] = coeffs.get(w, ZERO) + an * c
                for w, c in rn[0].items():
                    coeffs[w] = coeffs.get(w, ZERO) + ap * c
                coeffs.pop(v, None)
                coeffs = {w: c for w, c in coeffs.items() if c != 0}
                const = an * rp[1] + ap * rn[1]
                combo = {}
                for k, m in rp[3].items():
                    combo[k] = combo.get(k, ZERO) + an * m
                for k, m in rn[3].items():
                    combo[k] = combo.get(k, ZERO) + ap * m
                new.append((coeffs, const, rp[2] or rn[2], combo))
        rows = dedup(new)
    for coeffs, const, strict, combo in rows:
        assert not coeffs
        if const < 0 or (const == 0 and strict):
            return "infeasible", {k: m for k, m in combo.items() if m != 0}
    # feasible: assign variables in reverse elimination order
    point: dict = {}
    for v, vrows in reversed(stages):
        lo = hi = None
        lo_strict = hi_strict = False
        for coeffs, const, strict, _ in vrows:
            a = coeffs[v]
            rest = const + sum(
                (c * point[w] for w, c in coeffs.items() if w != v),
                start=ZERO,
            )
            b = -rest / a
            if a > 0:
                if lo is None or b > lo or (b == lo and strict):
                    lo, lo_strict = b, strict
            else:
                if hi is None or b < hi or (b == hi and strict):
                    hi, hi_strict = b, strict
        point[v] = _pick(lo, lo_strict, hi, hi_strict)
    return "witness", point


def _pick(lo, lo_strict, hi, hi_strict) -> Fraction:
    if lo is None and hi is None:
        return ZERO
    if lo is None:
        return hi - 1 if hi_strict else hi
    if hi is None:
        return lo + 1 if lo_strict else lo
    if lo == hi:
        assert not (lo_strict or hi_strict)
        return lo
    assert lo < hi
    return (lo + hi) / 2


# --------------------------------------------------------------- simplex


def _simplex_max(A, b, c):
    """max c.x s.t. A x = b, x >= 0; exact, Bland's rule.

    Returns (status, x, value) with status in {"optimal", "unbounded",
    "infeasible"}.
    """
    m, n = len(A), len(c)
    # phase 1: add artificials
    T = []
    for i in range(m):
        row = list(A[i])
        bi = b[i]
        if bi < 0:
            row = [-x for x in row]
            bi = -bi
        T.append(row + [ONE if j == i else ZERO for j in range(m)] + [bi])
    basis = [n + i for i in range(m)]
    cost = [ZERO] * n + [ONE] * m

    def run(T, basis, obj):
        # obj: coefficient list for minimization, length n + m
        while True:
            # reduced costs
            z = list(obj)
            for i, bi in enumerate(basis):
                if obj[bi] == 0:
                    continue
                coef = obj[bi]
                for j in range(len(z)):
                    z[j] -= coef * T[i][j]
            enter = -1
            for j in range(len(z)):
                if z[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return True
            ratio, leave = None, -1
            for i in range(len(T)):
                if T[i][enter] > 0:
                    r = T[i][-1] / T[i][enter]
                    if ratio is None or r < ratio or (
                        r == ratio and basis[i] < basis[leave]
                    ):
                        ratio, leave = r, i
            if leave < 0:
                return False  # unbounded
            piv = T[leave][enter]
            T[leave] = [x / piv for x in T[leave]]
            for i in range(len(T)):
                if i != leave and T[i][enter] != 0:
                    f = T[i][enter]
                    T[i] = [x - f * y for x, y in zip(T[i], T[leave])]
            basis[leave] = enter

    run(T, basis, cost)
    val = sum(T[i][-1] for i in range(m) if basis[i] >= n)
    if val > 0:
        return "infeasible", None, None
    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                if T[i][j] != 0:
                    piv = T[i][j]
                    T[i] = [x / piv for x in T[i]]
                    for k in range(m):
                        if k != i and T[k][j] != 0:
                            f = T[k][j]
                            T[k] = [x - f * y for x, y in zip(T[k], T[i])]
                    basis[i] = j
                    break
    # phase 2 on original columns
    T2 = [row[:n] + [row[-1]] for row in T]
    rows = [i for i in range(m) if basis[i] < n or T2[i][-1] == 0]
    # degenerate artificial rows are all-zero on original columns; keep them
    obj = [-x for x in c]  # maximize c == minimize -c

    def run2():
        while True:
            z = list(obj)
            for i in range(m):
                bi = basis[i]
                if bi < n and obj[bi] != 0:
                    coef = obj[bi]
                    for j in range(n):
                        z[j] -= coef * T2[i][j]
            enter = -1
            for j in range(n):
                if z[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return "optimal"
            ratio, leave = None, -1
            for i in range(m):
                if basis[i] >= n:
                    continue
                if T2[i][enter] > 0:
                    r = T2[i][-1] / T2[i][enter]
                    if ratio is None or r < ratio or (
                        r == ratio and basis[i] < basis[leave]
                    ):
                        ratio, leave = r, i
            if leave < 0:
                return "unbounded"
            piv = T2[leave][enter]
            T2[leave] = [x / piv for x in T2[leave]]
            for i in range(m):
                if i != leave and T2[i][enter] != 0:
                    f = T2[i][enter]
                    T2[i] = [x - f * y for x, y in zip(T2[i], T2[leave])]
            basis[leave] = enter

    status = run2()
    x = [ZERO] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T2[i][-1]
    value = sum(ci * xi for ci, xi in zip(c, x))
    return status, x, value


def simplex_decide(constraints):
    """("witness", point) or ("infeasible", None), via max-margin LP.

    Maximizes d subject to lhs_i >= d for strict rows, lhs_i >= 0 for
    the rest, d <= 1.  Strict feasibility holds iff the optimum is
    positive.
    """
    variables = system_variables(constraints)
    vix = {v: i for i, v in enumerate(variables)}
    nv = len(variables)
    # columns: v+ and v- per variable, then d+ and d-, then one surplus
    # per inequality row
    rows = []
    rhs = []
    strict_rows = []
    for c in constraints:
        row = [ZERO] * (2 * nv + 2)
        for v, a in c.coeffs:
            row[2 * vix[v]] += a
            row[2 * vix[v] + 1] -= a
        if c.strict:
            row[2 * nv] -= ONE
            row[2 * nv + 1] += ONE
        rows.append(row)
        rhs.append(-c.const)
        strict_rows.append(c.strict)
    # d <= 1
    rows.append(
        [ZERO] * (2 * nv) + [-ONE, ONE]
    )
    rhs.append(-ONE)
    ncols = 2 * nv + 2 + len(rows)
    A = []
    for i, row in enumerate(rows):
        surplus = [ZERO] * len(rows)
        surplus[i] = -ONE
        A.append(row + surplus)
    cvec = [ZERO] * ncols
    cvec[2 * nv] = ONE
    cvec[2 * nv + 1] = -ONE
    status, x, value = _simplex_max(A, rhs, cvec)
    if status == "infeasible":
        return "infeasible", None
    assert status == "optimal", status  # d <= 1 keeps it bounded
    if value <= 0:
        return "infeasible", None
    point = {
        v: x[2 * i] - x[2 * i + 1] for v, i in vix.items()
    }
    return "witness", point


# ------------------------------------------------------------ interface


def check_witness(constraints, point: dict) -> bool:
    return all(c.holds_at(point) for c in constraints)


def check_infeasible(constraints, combo: dict) -> bool:
    coeffs: dict = {}
    const = ZERO
    strict = False
    for i, mult in combo.items():
        if mult <= 0:
            return False
        c = constraints[i]
        for v, a in c.coeffs:
            coeffs[v] = coeffs.get(v, ZERO) + mult * a
        const += mult * c.const
        strict = strict or c.strict
    if any(a != 0 for a in coeffs.values()):
        return False
    return const < 0 or (const == 0 and strict)


def decide_feasible(constraints) -> Certificate:
    """Decide strict feasibility with both engines; replay the result."""
    kind, data = fm_decide(constraints)
    skind, spoint = simplex_decide(constraints)
    if kind != skind:
        raise AssertionError(
            "engine disagreement: fm=%s simplex=%s" % (kind, skind)
        )
    if kind == "witness":
        if not check_witness(constraints, data):
            raise AssertionError("witness replay failed")
        if not check_witness(constraints, spoint):
            raise AssertionError("simplex witness replay failed")
        return Witness(tuple(sorted(data.items(), key=lambda p: str(p[0]))))
    if not check_infeasible(constraints, data):
        raise AssertionError("infeasibility replay failed")
    return Infeasible(
        tuple(sorted(data.items()))
    )


_axiom_cache: dict = {}


def is_axiom(h: Hypersequent, engine: str = "both") -> bool:
    """Validity of the atomic part of h, decided exactly.

    engine "both" (default) cross-checks Fourier-Motzkin against the
    simplex and replays the certificate; "fm" is the fast single-engine
    path used by inner search loops.
    """
    at = atomic_part(h)
    if not at.comps:
        return False
    # validity only depends on the set of components
    key = (frozenset(at.comps), engine)
    hit = _axiom_cache.get(key)
    if hit is not None:
        return hit
    seen = set()
    comps = []
    for c in at.comps:
        if c not in seen:
            seen.add(c)
            comps.append(c)
    system = negation_system(Hypersequent(tuple(comps)))
    if engine == "fm":
        ans = fm_decide(system)[0] == "infeasible"
    else:
        ans = isinstance(decide_feasible(system), Infeasible)
    if len(_axiom_cache) > 100000:
        _axiom_cache.clear()
    _axiom_cache.setdefault(key, ans)
    return ans


# ----------------------------------------- witness as an interpretation


def witness_interpretation(h: Hypersequent, point: dict):
    """Build (interpretation, valuation) realizing a negation-system
    witness over the term model of h; replay with hs_is_true."""
    terms: dict = {}

    def idx(t: Term) -> int:
        if isinstance(t, Func):
            for a in t.args:
                idx(a)
        if t not in terms:
            terms[t] = len(terms)
        return terms[t]

    atoms = []
    for s in h.comps:
        for f in s.formulas():
            if isinstance(f, Atom):
                atoms.append(f)
    for f in atoms:
        for a in f.args:
            idx(a)
    m = HsInterpretation(size=max(1, len(terms)))
    nu = {}
    for t, i in terms.items():
        if isinstance(t, Var):
            nu[t.name] = i
        elif isinstance(t, Param):
            m.params[t.name] = i
        else:
            m.funcs.setdefault(t.name, {})[
                tuple(terms[a] for a in t.args)
            ] = i
    for f in atoms:
        m.preds.setdefault(f.pred, {})[
            tuple(terms[a] for a in f.args)
        ] = point.get(f, ZERO)
    for s in h.comps:
        for f in s.formulas():
            if isinstance(f, SpVar):
                m.spvars[(f.tag, f.index)] = point.get(f, m.spvar_value(f.tag, f.index))
    return m, nu
