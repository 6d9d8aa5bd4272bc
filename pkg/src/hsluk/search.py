"""Backward proof search for G0 and G3.

Quantifier-free search is complete for both calculi: every applicable
logical rule is invertible, so the goal is decomposed eagerly until the
leaves are atomic and then settled by the axiom decider.  In G3 the
decomposition strictly shrinks the formula weight; in G0 the rules are
cumulative, so a step is only taken when it contributes a component not
already present, which saturates.

With quantifiers the search stays sound but incomplete: rules that need
a proper term (all_left, ex_right) are delayed and tried with every
closed term already in the goal plus one fresh parameter, under a step
budget.  Rules with a freshness condition run eagerly.
"""

from __future__ import annotations

from .calculi import (
    CalculusId,
    ProofTree,
    RuleApplication,
    leaf,
    node,
    is_axiom,
    premises_of,
)
from .syntax import (
    Formula,
    Func,
    Hypersequent,
    Implies,
    NameSupply,
    Param,
    Quant,
    Sequent,
    Term,
    is_closed_term,
)


def has_quantifiers(h: Hypersequent) -> bool:
    def q(f: Formula) -> bool:
        if isinstance(f, Quant):
            return True
        if isinstance(f, Implies):
            return q(f.left) or q(f.right)
        return False

    return any(q(f) for f in h.formulas())


def closed_terms_of(h: Hypersequent) -> list:
    """Closed subterms occurring in h, parameters first."""
    seen = {}

    def term(t: Term):
        if isinstance(t, Func):
            for a in t.args:
                term(a)
        if is_closed_term(t):
            seen.setdefault(t, None)

    def form(f: Formula):
        if hasattr(f, "args"):
            for a in f.args:
                term(a)
        elif isinstance(f, Implies):
            form(f.left)
            form(f.right)
        elif isinstance(f, Quant):
            form(f.body)

    for f in h.formulas():
        form(f)
    return sorted(seen, key=lambda t: (not isinstance(t, Param), str(t)))


class _Search:
    def __init__(
        self,
        calc: CalculusId,
        budget: int,
        max_delayed: int = 8,
        charge_all: bool = False,
    ):
        self.calc = calc
        self.budget = budget
        self.max_delayed = max_delayed
        self.charge_all = charge_all
        self.supply = None  # NameSupply, set at entry
        self._ax_memo: dict = {}
        self._fail: dict = {}  # (state, done) -> deepest depth that failed

    def run(self, goal: Hypersequent) -> ProofTree | None:
        if self.calc.base not in ("G0", "G1hat", "G1", "G3"):
            raise ValueError("search supports G0/G1hat/G1/G3, not %s" % self.calc)
        self.supply = NameSupply([goal])
        return self.prove(goal, frozenset(), self.max_delayed)

    def spend(self) -> bool:
        if self.budget <= 0:
            return False
        self.budget -= 1
        return True

    def _is_axiom(self, h: Hypersequent) -> bool:
        # single-engine during search; the final tree is re-verified by
        # the dual-engine checker
        from .syntax import atomic_part

        key = atomic_part(h)
        if key not in self._ax_memo:
            self._ax_memo[key] = is_axiom(self.calc, h, engine="fm")
        return self._ax_memo[key]

    def prove(self, h: Hypersequent, done: frozenset, depth: int) -> ProofTree | None:
        if self._is_axiom(h):
            return leaf(h)
        state = (tuple(sorted(h.comps, key=str)), done)
        if self._fail.get(state, -1) >= depth:
            return None
        got = self._prove(h, done, depth)
        if got is None and self._fail.get(state, -1) < depth:
            # sound within one run: budget only shrinks and done only
            # grows, so a retry of this state cannot do better
            self._fail[state] = depth
        return got

    def _prove(self, h, done, depth) -> ProofTree | None:
        if self.charge_all:
            # every application is a backtrackable choice costing one
            # unit of depth; the failure cache merges permuted orders
            if depth <= 0:
                return None
            for app, key in self.choice_moves(h, done):
                if not self.spend():
                    return None
                got = self.expand(h, app, done | {key} if key else done, depth - 1)
                if got is not None:
                    return got
            return None
        move = self.eager_move(h, done)
        if move is not None:
            # invertible rules are deterministic and free; `depth`
            # bounds delayed instantiation choices per branch
            app, key = move
            return self.expand(h, app, done | {key} if key else done, depth)
        if depth <= 0:
            return None
        for app, key in self.delayed_moves(h, done):
            if not self.spend():
                return None
            got = self.expand(h, app, done | {key}, depth - 1)
            if got is not None:
                return got
        return None

    def expand(self, h, app, done, depth) -> ProofTree | None:
        prems = premises_of(self.calc, h, app)
        kids = []
        for p in prems:
            sub = self.prove(p, done, depth)
            if sub is None:
                return None
            kids.append(sub)
        return node(h, app, *kids)

    # ---- move generation

    def eager_move(self, h, done):
        g0 = self.calc.base in ("G0", "G1hat", "G1")
        for i, s in enumerate(h.comps):
            for slot, f in enumerate(s.ant):
                if isinstance(f, Implies):
                    app = RuleApplication("impl_left", comp=i, side="L", slot=slot)
                    if self.calc.base in ("G1hat", "G1", "G3"):
                        app = self._with_spvar(app, h, 1)
                    # plain-G0 re-application is pruned by usefulness,
                    # not by a done key: a later premise branch may
                    # still need the extras.  The spvar variants make a
                    # fresh variable per firing, so usefulness cannot
                    # see the repetition and they need the key.
                    key = None if self.calc.base == "G0" else (s, "L", f, "impl_left")
                    if (key in done if key else False) or (
                        g0 and not self._useful(h, app)
                    ):
                        continue
                    return app, key
                if isinstance(f, Quant) and f.kind == "exists":
                    key = (s, "L", f, "ex_left")
                    if key in done:
                        continue
                    app = RuleApplication(
                        "ex_left",
                        comp=i,
                        side="L",
                        slot=slot,
                        param=self.supply.fresh_param(),
                    )
                    if g0 and not self._useful(h, app):
                        continue
                    return app, key
            for slot, f in enumerate(s.suc):
                if isinstance(f, Implies):
                    app = RuleApplication("impl_right", comp=i, side="R", slot=slot)
                    key = None if g0 else (s, "R", f, "impl_right")
                    if (key in done if key else False) or (
                        g0 and not self._useful(h, app)
                    ):
                        continue
                    return app, key
                if isinstance(f, Quant) and f.kind == "forall":
                    key = (s, "R", f, "all_right")
                    if key in done:
                        continue
                    app = RuleApplication(
                        "all_right",
                        comp=i,
                        side="R",
                        slot=slot,
                        param=self.supply.fresh_param(),
                    )
                    if g0 and not self._useful(h, app):
                        continue
                    return app, key
        return None

    def choice_moves(self, h, done):
        """Useful implication applications, closers first; only used for
        quantifier-free goals in the cumulative calculi."""
        out = []
        for i, s in enumerate(h.comps):
            for side, row in (("L", s.ant), ("R", s.suc)):
                for slot, f in enumerate(row):
                    if not isinstance(f, Implies):
                        continue
                    rule = "impl_left" if side == "L" else "impl_right"
                    app = RuleApplication(rule, comp=i, side=side, slot=slot)
                    key = None
                    if self.calc.base in ("G1hat", "G1") and side == "L":
                        app = self._with_spvar(app, h, 1)
                        key = (s, side, f, rule)
                        if key in done:
                            continue
                    if not self._useful(h, app):
                        continue
                    prems = premises_of(self.calc, h, app)
                    rank = 0 if all(self._is_axiom(p) for p in prems) else 1
                    out.append((rank, len(out), app, key))
        out.sort(key=lambda x: (x[0], x[1]))
        return [(app, key) for _, _, app, key in out]

    def delayed_moves(self, h, done):
        g0 = self.calc.base in ("G0", "G1hat", "G1")
        fresh = self.supply.fresh_param()
        pool = closed_terms_of(h) + [fresh]
        raw = []
        for i, s in enumerate(h.comps):
            for slot, f in enumerate(s.ant):
                if isinstance(f, Quant) and f.kind == "forall":
                    for t in pool:
                        # one fresh instantiation per occurrence, ever
                        key = (s, "L", f, "all_left", "fresh" if t is fresh else t)
                        if key in done:
                            continue
                        app = RuleApplication(
                            "all_left", comp=i, side="L", slot=slot, term=t
                        )
                        if self.calc.base == "G3":
                            app = self._with_spvar(app, h, 1)
                        raw.append((app, key, t is fresh, s))
            for slot, f in enumerate(s.suc):
                if isinstance(f, Quant) and f.kind == "exists":
                    for t in pool:
                        key = (s, "R", f, "ex_right", "fresh" if t is fresh else t)
                        if key in done:
                            continue
                        app = RuleApplication(
                            "ex_right", comp=i, side="R", slot=slot, term=t
                        )
                        if self.calc.base == "G3":
                            app = self._with_spvar(app, h, 0)
                        raw.append((app, key, t is fresh, s))
        # rank: instantiations that close the goal outright, then terms
        # already occurring in the same component, then other pool
        # terms, then the single fresh parameter
        scored = []
        present = set(h.comps)
        for pos, (app, key, is_fresh, s) in enumerate(raw):
            prems = premises_of(self.calc, h, app)
            if g0 and not all(
                any(c not in present for c in p.comps) for p in prems
            ):
                continue
            if all(self._is_axiom(p) for p in prems):
                rank = 0
            elif is_fresh:
                rank = 3
            elif app.term in closed_terms_of(Hypersequent((s,))):
                rank = 1
            else:
                rank = 2
            scored.append((rank, pos, app, key))
        scored.sort(key=lambda x: (x[0], x[1]))
        return [(app, key) for _, _, app, key in scored]

    def _with_spvar(self, app, h, tag):
        return RuleApplication(
            app.rule,
            comp=app.comp,
            side=app.side,
            slot=app.slot,
            term=app.term,
            spvar=self.supply.fresh_spvar(tag),
        )

    def _useful(self, h, app) -> bool:
        """Cumulative step is worth taking iff every premise adds a new
        component value.

        A premise whose component set equals the conclusion's is the
        same search problem over again (multiplicities never matter in
        a cumulative calculus), so a step producing one is circular and
        gets pruned.
        """
        present = set(h.comps)
        for p in premises_of(self.calc, h, app):
            if not any(c not in present for c in p.comps):
                return False
        return True


def prove_bounded(
    goal: Hypersequent, calc: CalculusId, budget: int = 400
) -> ProofTree | None:
    """Bounded backward search; None means 'not found', not invalid.

    Iterative deepening on the number of term-instantiation choices a
    branch may make, so shallow proofs are found before the search can
    wander through deep instantiation chains.
    """
    for d in range(0, 7):
        got = _Search(calc, budget, max_delayed=d).run(goal)
        if got is not None:
            return got
    return None


def prove_qf(goal: Hypersequent, calc: CalculusId) -> ProofTree | None:
    """Decision by search for quantifier-free goals: None means the
    goal is not provable (equivalently, not valid)."""
    if has_quantifiers(goal):
        raise ValueError("prove_qf wants a quantifier-free goal")
    if calc.base != "G3":
        # cumulative saturation diverges badly on invalid goals, so
        # settle validity first with the strictly shrinking calculus
        from .calculi import G3 as _g3

        if _Search(_g3, 10**9).run(goal) is None:
            return None
        for d in range(1, 41):
            got = _Search(calc, 10**9, max_delayed=d, charge_all=True).run(goal)
            if got is not None:
                return got
        raise RuntimeError("provable goal, but no proof within the depth cap")
    got = _Search(calc, 10**9).run(goal)
    return got
