"""Proof transformations between the hypersequent calculi.

The constructions here rewrite whole proof trees: adding or removing
components everywhere, grafting subproofs, replacing a rule of one
calculus by a derivation in another.  Every public entry point returns
a tree that passes the checker of its target calculus; most of them
assert this on the way out.

Trees are assumed to be in canonical layout: the children of a node
appear in the order of the synthesized premises, and each node's stored
component order is the conclusion's components followed by whatever the
rule appended.  Both the checker and the search produce this layout.
"""

from __future__ import annotations

from dataclasses import replace

from .calculi import (
    CalculusId,
    CheckReport,
    ProofTree,
    RuleApplication,
    G0,
    G1HAT,
    GAL,
    GL,
    LOGICAL_RULES,
    assert_checks,
    check,
    is_axiom,
    leaf,
    node,
    premises_of,
)
from collections import Counter

from .syntax import (
    Atom,
    is_atomic,
    Formula,
    Hypersequent,
    Implies,
    NameSupply,
    Param,
    Quant,
    Sequent,
    SpVar,
    hs,
    hs_map,
    is_sentence,
    map_params,
    map_params_term,
    map_spvars,
    merge,
    seq,
    seq_map,
    substitute,
    symbols_of,
)


class TransformError(RuntimeError):
    pass


# ------------------------------------------------------ tree rewriting


def _map_formula(f, pm: dict, sm: dict) -> Formula:
    return map_spvars(map_params(f, pm), sm)


def map_tree(pf: ProofTree, pm: dict, sm: dict) -> ProofTree:
    """Rename parameters (pm: name -> Param) and spvars
    (sm: (tag, index) -> SpVar) through a whole tree, including the
    proper data stored in rule applications."""

    def mf(f):
        return _map_formula(f, pm, sm)

    def go(n: ProofTree) -> ProofTree:
        app = n.app
        if app is not None:
            app = replace(
                app,
                term=map_params_term(app.term, pm) if app.term is not None else None,
                param=pm.get(app.param.name, app.param)
                if app.param is not None
                else None,
                spvar=sm.get((app.spvar.tag, app.spvar.index), app.spvar)
                if app.spvar is not None
                else None,
                formula=mf(app.formula) if app.formula is not None else None,
                seq_a=seq_map(app.seq_a, mf) if app.seq_a is not None else None,
                seq_b=seq_map(app.seq_b, mf) if app.seq_b is not None else None,
            )
        return ProofTree(hs_map(n.root, mf), app, tuple(go(c) for c in n.children))

    return go(pf)


def tree_symbols(pf: ProofTree) -> set:
    out = set()

    def go(n):
        out.update(symbols_of(n.root))
        for c in n.children:
            go(c)

    go(pf)
    return out


def rename_apart(pf: ProofTree, avoid) -> ProofTree:
    """Rename every parameter and spvar that is private to the proof
    (absent from its end hypersequent) so that none clashes with the
    symbols of `avoid` (any syntax object or iterable of them)."""
    supply = NameSupply([pf.root, avoid, *(n.root for n in pf.leaves())])
    rootsym = symbols_of(pf.root)
    pm: dict = {}
    sm: dict = {}
    for kind, *data in sorted(tree_symbols(pf) - rootsym, key=str):
        if kind == "param":
            pm[data[0]] = supply.fresh_param()
        elif kind == "spvar":
            sm[(data[0], data[1])] = supply.fresh_spvar(data[0])
    if not pm and not sm:
        return pf
    return map_tree(pf, pm, sm)


# --------------------------------------------------- adding components


def weaken_ext(pf: ProofTree, calc: CalculusId, *extras: Sequent) -> ProofTree:
    """From a proof of H make a proof of H | extras (external weakening
    performed at every node).

    Valid for the calculi whose axioms survive extra components, i.e.
    all the G-family bases; GL/GaL proofs should use an `ew` inference
    instead.
    """
    if calc.base in ("GL", "GaL"):
        raise TransformError("weaken_ext needs set-stable axioms; use ew in GL")
    if not extras:
        return pf
    pf = rename_apart(pf, hs(*extras))

    def go(n: ProofTree) -> ProofTree:
        return ProofTree(
            n.root.extended(*extras), n.app, tuple(go(c) for c in n.children)
        )

    return go(pf)


# ----------------------------------------------------- canonical layout


def canonicalize(pf: ProofTree, calc: CalculusId) -> ProofTree:
    """Rebuild a checking proof so that each node's stored component
    order is exactly the synthesized premise of its parent.  The
    position-sensitive walks assume this layout."""

    def retarget(n: ProofTree, target: Hypersequent) -> ProofTree:
        if len(n.root.comps) != len(target.comps):
            raise TransformError("node differs from its premise slot")
        if n.root.comps == target.comps:  # already in place
            perm = {k: k for k in range(len(target.comps))}
        else:
            used = [False] * len(n.root.comps)
            perm = {}
            for newi, c in enumerate(target.comps):
                for oldi, d in enumerate(n.root.comps):
                    if not used[oldi] and d == c:
                        used[oldi] = True
                        perm[oldi] = newi
                        break
                else:
                    raise TransformError("node differs from its premise slot")
        if n.app is None:
            return leaf(target)
        new_comp = perm[n.app.comp]
        new_slot = n.app.slot
        if n.app.slot is not None:
            # equal sequents may store their formulas in another order
            old_f = n.root.comps[n.app.comp].at(n.app.side, n.app.slot)
            row = (
                target.comps[new_comp].ant
                if n.app.side == "L"
                else target.comps[new_comp].suc
            )
            new_slot = next(
                k for k, g in enumerate(row) if g == old_f
            )
        app = replace(
            n.app,
            comp=new_comp,
            slot=new_slot,
            comp2=perm[n.app.comp2] if n.app.comp2 is not None else None,
        )
        prems = premises_of(calc, target, app)
        if len(prems) != len(n.children):
            raise TransformError("premise count mismatch while retargeting")
        kids = tuple(retarget(c, p) for c, p in zip(n.children, prems))
        return node(target, app, *kids)

    return retarget(pf, pf.root)


# -------------------------------------------------- dropping duplicates


_REPLACING_RULES = {
    # rules that replace their principal component instead of keeping it
    "cut",
    "lcut",
    "den",
    "den0",
    "den1",
}


def contract_ext(pf: ProofTree, calc: CalculusId, i: int, j: int) -> ProofTree:
    """From a proof of H with equal components at positions i and j
    of the root, make a proof of H minus one of the copies.

    Supported for the cumulative bases (G0/G1hat/G1) and their
    extensions: there the axioms depend only on the set of components,
    and a rule applied to one copy applies equally to the other.  The
    duplicate is tracked by value, so the tree's component layout does
    not matter.
    """
    if calc.base not in ("G0", "G1hat", "G1"):
        raise TransformError("contract_ext wants a cumulative base calculus")
    root = pf.root
    if not (0 <= i < len(root.comps) and 0 <= j < len(root.comps)) or i == j:
        raise TransformError("contract_ext needs two distinct positions")
    if root.comps[i] != root.comps[j]:
        raise TransformError("components %d and %d differ" % (i, j))
    return contract_value(pf, calc, root.comps[j])


def contract_value(pf: ProofTree, calc: CalculusId, s: Sequent) -> ProofTree:
    """Drop one copy of a component occurring (at least) twice."""

    def go(n: ProofTree) -> ProofTree:
        root = n.root
        copies = [k for k, c in enumerate(root.comps) if c == s]
        if len(copies) < 2:
            raise TransformError("tracked duplicate vanished at %s" % (root,))
        app = n.app
        if app is not None and root.comps[app.comp] == s:
            drop = next(k for k in copies if k != app.comp)
        else:
            drop = copies[-1]
        new_root = root.without(drop)
        if app is None:
            return leaf(new_root)
        comp = app.comp - 1 if app.comp > drop else app.comp
        comp2 = app.comp2
        if comp2 is not None:
            comp2 = comp2 - 1 if comp2 > drop else comp2
        new_app = replace(app, comp=comp, comp2=comp2)
        if app.rule in _REPLACING_RULES and root.comps[app.comp] == s:
            raise TransformError(
                "component-replacing rule consumes the tracked duplicate"
            )
        kids = tuple(go(c) for c in n.children)
        return node(new_root, new_app, *kids)

    return go(pf)


# -------------------------------------- adding formulas to a component


def merge_walk(
    pf: ProofTree,
    calc: CalculusId,
    add: dict,
    repair_budget: int = 200,
) -> ProofTree:
    """From a proof of H make a proof of H with extra formulas merged
    into chosen components: add maps a root component index to a
    Sequent holding the antecedent/succedent additions.

    The additions follow each component's copy down the tree; extras a
    rule derives from a marked principal component inherit them.  In a
    cumulative calculus the conclusion components persist into every
    premise at the same positions, which is what makes the walk purely
    positional.  Leaves that stop being axioms (possible when the
    addition strengthens a succedent) are reproved by bounded search.
    """
    if calc.base not in ("G0", "G1hat", "G1"):
        raise TransformError("merge_walk wants a cumulative base calculus")
    pf = canonicalize(rename_apart(pf, hs(*add.values())), calc)
    out = _merge_core(pf, calc, add, lambda new_root, orig, marks: leaf(new_root))
    return repair_leaves(out, calc, repair_budget)


def _merge_core(
    pf: ProofTree,
    calc: CalculusId,
    add: dict,
    on_leaf,
    side: tuple = (),
) -> ProofTree:
    """The walk behind merge_walk and mix.  Expects pf renamed apart
    and canonical.  `side` components are appended to every node;
    `on_leaf(new_root, orig_root, marks)` decides what each leaf
    becomes."""

    def extend_root(root: Hypersequent, marks: dict) -> Hypersequent:
        comps = list(root.comps)
        for k, extra in marks.items():
            comps[k] = comps[k].extended(extra.ant, extra.suc)
        return Hypersequent(tuple(comps) + side)

    def go(n: ProofTree, marks: dict) -> ProofTree:
        new_root = extend_root(n.root, marks)
        if n.app is None:
            return on_leaf(new_root, n.root, marks)
        app = n.app
        n_comps = len(n.root.comps)
        child_marks = dict(marks)
        if app.comp in marks:
            extra = marks[app.comp]
            derived = _derived_extra_marks(calc, app, extra)
            for off, mark in derived:
                child_marks[n_comps + off] = mark
        kids = tuple(go(c, child_marks) for c in n.children)
        return node(new_root, app, *kids)

    return go(pf, dict(add))


def _derived_extra_marks(calc: CalculusId, app: RuleApplication, extra: Sequent):
    """Offsets (within the extras a rule appends) of the components
    derived from the principal one, with the additions they inherit."""
    r = app.rule
    if r == "impl_left":
        if calc.base in ("G1hat", "G1"):
            return [(0, extra)]  # the (B => sp, A) component is fresh
        return [(0, extra), (1, extra)]
    if r in ("impl_right", "all_left", "all_right", "ex_left", "ex_right"):
        # single appended component per premise, derived from the
        # principal one (impl_right appends one to each premise)
        return [(0, extra)]
    if r in ("ccan", "lccan"):
        return [(0, extra)]
    raise TransformError("merge_walk cannot pass rule %r" % (r,))


def repair_leaves(pf: ProofTree, calc: CalculusId, budget: int = 200) -> ProofTree:
    """Replace any non-axiom leaf by a freshly searched proof."""
    from .search import prove_bounded

    def go(n: ProofTree) -> ProofTree:
        if n.app is None:
            if is_axiom(calc, n.root, engine="fm"):
                return n
            sub = prove_bounded(n.root, calc, budget)
            if sub is None:
                raise TransformError("cannot reprove leaf %s" % (n.root,))
            return sub
        return ProofTree(n.root, n.app, tuple(go(c) for c in n.children))

    return go(pf)


# -------------------------------------------- merging two components


def mix(
    pf1: ProofTree,
    pf2: ProofTree,
    calc: CalculusId,
    i: int | None = None,
    j: int | None = None,
) -> ProofTree:
    """From proofs of (G | S1) and (G | S2) make a proof of
    (G | S1,S2), the two distinguished components merged into one.

    S2 is merged into every ancestor of S1 throughout the first proof;
    each leaf occurrence that used to be an atomic ancestor then gets a
    freshly renamed copy of the second proof grafted on top, with that
    ancestor's content merged into the ancestors of S2 and the leaf's
    remaining components carried along.
    """
    if calc.base not in ("G0", "G1hat", "G1"):
        raise TransformError("mix wants a cumulative base calculus")
    r1, r2 = pf1.root, pf2.root
    if i is None:
        i = len(r1.comps) - 1
    if j is None:
        j = len(r2.comps) - 1
    if Counter(r1.without(i).comps) != Counter(r2.without(j).comps):
        raise TransformError("the side components of the two roots differ")
    s2 = r2.comps[j]
    pf1 = canonicalize(rename_apart(pf1, pf2.root), calc)
    pf2 = canonicalize(pf2, calc)

    def graft_chain(cur: Hypersequent, pending: list) -> ProofTree:
        if is_axiom(calc, cur, engine="fm"):
            return leaf(cur)
        if not pending:
            raise TransformError("mix leaf %s is not an axiom" % (cur,))
        orig, rest = pending[0], pending[1:]
        d2 = rename_apart(pf2, cur)
        want = Counter(d2.root.replaced(
            j, d2.root.comps[j].extended(orig.ant, orig.suc)
        ).comps)
        have = Counter(cur.comps)
        if want - have:
            raise TransformError("mix leaf %s lost a root component" % (cur,))
        diff = have - want
        side = tuple(c for c in diff for _ in range(diff[c]))
        return _merge_core(
            d2,
            calc,
            {j: orig},
            lambda nr, orig2, marks2: graft_chain(nr, rest),
            side=side,
        )

    def on_leaf(new_root, orig_root, marks):
        pending = [
            orig_root.comps[k]
            for k in sorted(marks)
            if orig_root.comps[k].is_atomic()
        ]
        return graft_chain(new_root, pending)

    return _merge_core(pf1, calc, {i: s2}, on_leaf)


# ------------------------------------ adding a formula on the left


def weaken_left(pf: ProofTree, calc: CalculusId, i: int, c: Formula) -> ProofTree:
    """From a proof of (G | S) make a proof of the same hypersequent
    with c added to the antecedent of the distinguished component."""
    if calc.base not in ("G0", "G1hat", "G1"):
        raise TransformError("weaken_left wants a cumulative base calculus")
    if isinstance(c, Quant):
        # instantiate with a fresh parameter, then bind it back with the
        # left quantifier rule after restoring the target component
        a = NameSupply([pf.root, c, *(n.root for n in pf.leaves())]).fresh_param()
        inner = weaken_left(pf, calc, i, substitute(c.body, c.var, a))
        target = pf.root.comps[i].extended(ant=[c])
        w = weaken_ext(inner, calc, target)
        concl = pf.root.replaced(i, target)
        rule = "all_left" if c.kind == "forall" else "ex_left"
        app = RuleApplication(
            rule,
            comp=i,
            side="L",
            slot=len(target.ant) - 1,
            **({"term": a} if c.kind == "forall" else {"param": a}),
        )
        return assert_checks(node(concl, app, w), calc)

    pf = canonicalize(rename_apart(pf, hs(seq([c], []))), calc)
    supply = NameSupply([pf.root, c, *(n.root for n in pf.leaves())])

    def on_leaf(new_root, orig_root, marks):
        if is_atomic(c):
            return leaf(new_root)
        # c = A -> B: one backward implication step per marked component
        # puts the original (still axiom-supporting) component back
        cur = new_root
        steps = []
        for k in sorted(marks):
            orig = orig_root.comps[k]
            app = RuleApplication("impl_left", comp=k, side="L", slot=len(orig.ant))
            if calc.base in ("G1hat", "G1"):
                app = replace(app, spvar=supply.fresh_spvar(1))
            prems = premises_of(calc, cur, app)
            steps.append((cur, app))
            cur = prems[0]
        out = leaf(cur)
        for root, app in reversed(steps):
            out = node(root, app, out)
        return out

    out = _merge_core(pf, calc, {i: seq([c], [])}, on_leaf)
    out = repair_leaves(out, calc)
    return assert_checks(out, calc)


# ------------------------------------------------ canonical sequents


def derive_id(a: Formula, calc: CalculusId = G0) -> ProofTree:
    """A proof of (a => a), by structural recursion on a."""
    if calc.base != "G0":
        raise TransformError("derive_id builds plain cumulative proofs")
    goal = hs(seq([a], [a]))
    if is_atomic(a):
        return leaf(goal)
    if isinstance(a, Implies):
        b, c = a.left, a.right
        p1 = hs(seq([a], [a]), seq([a], []))
        p2 = hs(seq([a], [a]), seq([a, b], [c]))
        # left branch: one implication step exposes the true sequent (=>)
        l1 = node(
            p1,
            RuleApplication("impl_left", comp=1, side="L", slot=0),
            leaf(p1.extended(seq([], []), seq([c], [b]))),
        )
        # right branch: expose (b,c => c,b) and graft the two identities
        dbc = mix(derive_id(b, calc), derive_id(c, calc), calc)
        sub = weaken_ext(dbc, calc, p2.comps[0], p2.comps[1], seq([b], [c]))
        l2 = node(p2, RuleApplication("impl_left", comp=1, side="L", slot=0), sub)
        return assert_checks(
            node(goal, RuleApplication("impl_right", comp=0, side="R", slot=0), l1, l2),
            calc,
        )
    if isinstance(a, Quant):
        par = NameSupply([goal]).fresh_param()
        inst = substitute(a.body, a.var, par)
        inner = weaken_ext(derive_id(inst, calc), calc, *(
            (goal.comps[0], seq([a], [inst]))
            if a.kind == "forall"
            else (goal.comps[0], seq([inst], [a]))
        ))
        if a.kind == "forall":
            step1 = node(
                hs(goal.comps[0], seq([a], [inst])),
                RuleApplication("all_left", comp=1, side="L", slot=0, term=par),
                inner,
            )
            return assert_checks(
                node(
                    goal,
                    RuleApplication("all_right", comp=0, side="R", slot=0, param=par),
                    step1,
                ),
                calc,
            )
        step1 = node(
            hs(goal.comps[0], seq([inst], [a])),
            RuleApplication("ex_right", comp=1, side="R", slot=0, term=par),
            inner,
        )
        return assert_checks(
            node(
                goal,
                RuleApplication("ex_left", comp=0, side="L", slot=0, param=par),
                step1,
            ),
            calc,
        )
    raise TransformError("cannot derive identity for %r" % (a,))


def derive_zero_left(a: Formula, calc: CalculusId = G0) -> ProofTree:
    """A proof of (0 => a), by structural recursion on a."""
    if calc.base != "G0":
        raise TransformError("derive_zero_left builds plain cumulative proofs")
    from .syntax import ZERO

    goal = hs(seq([ZERO], [a]))
    if is_atomic(a):
        return leaf(goal)
    if isinstance(a, Implies):
        b, c = a.left, a.right
        p1 = hs(goal.comps[0], seq([ZERO], []))
        sub = weaken_ext(
            weaken_left(derive_zero_left(c, calc), calc, 0, b), calc, goal.comps[0]
        )
        return assert_checks(
            node(
                goal,
                RuleApplication("impl_right", comp=0, side="R", slot=0),
                leaf(p1),
                sub,
            ),
            calc,
        )
    if isinstance(a, Quant):
        par = NameSupply([goal]).fresh_param()
        inst = substitute(a.body, a.var, par)
        inner = weaken_ext(derive_zero_left(inst, calc), calc, goal.comps[0])
        rule = (
            RuleApplication("all_right", comp=0, side="R", slot=0, param=par)
            if a.kind == "forall"
            else RuleApplication("ex_right", comp=0, side="R", slot=0, term=par)
        )
        return assert_checks(node(goal, rule, inner), calc)
    raise TransformError("cannot derive (0 => %s)" % (a,))


# --------------------------------------- the structural-rule calculi


def atomic_completeness_gla(h_at: Hypersequent, calc: CalculusId = GL) -> ProofTree:
    """A GL-style proof of a valid atomic hypersequent, built from the
    infeasibility certificate of its negation system.

    The certificate multipliers are scaled to integers n_i; mixing n_i
    copies of each component gives one big sequent in which every
    succedent formula can be paired with an equal antecedent formula or
    with an antecedent 0, the rest weakened in on the left.  Splitting
    the big sequent back apart and fixing multiplicities with ec/ew
    recovers the input.
    """
    from math import lcm

    from . import lindec
    from .syntax import ZERO

    if calc.base not in ("GL", "GaL"):
        raise TransformError("atomic_completeness_gla targets GL or GaL")
    if any(not s.is_atomic() for s in h_at.comps):
        raise TransformError("input is not atomic")
    system = lindec.negation_system(h_at)
    cert = lindec.decide_feasible(system)
    if not isinstance(cert, lindec.Infeasible):
        raise TransformError("input hypersequent is not valid")
    lam = {}
    for k, q in cert.multipliers:
        origin = system[k].origin
        if origin[0] == "comp":
            lam[origin[1]] = q
    scale = lcm(*(q.denominator for q in lam.values())) if lam else 1
    counts = {i: int(q * scale) for i, q in lam.items() if q * scale > 0}
    if not counts:
        raise TransformError("certificate uses no component constraint")

    parts = []
    gamma: Counter = Counter()
    delta: Counter = Counter()
    for i in sorted(counts):
        for _ in range(counts[i]):
            parts.append(h_at.comps[i])
            gamma.update(h_at.comps[i].ant)
            delta.update(h_at.comps[i].suc)

    # pair every succedent formula with an equal antecedent one, or
    # with an antecedent 0; the certificate guarantees the budget
    axioms = []
    for f in sorted(delta, key=str):
        k = min(delta[f], gamma[f])
        axioms += [seq([f], [f])] * k
        axioms += [seq([ZERO], [f])] * (delta[f] - k)
    used: Counter = Counter()
    for ax in axioms:
        used.update(ax.ant)
    if used - gamma:
        raise TransformError("certificate realization ran out of antecedents")
    leftovers = sorted((gamma - used).elements(), key=str)

    if axioms:
        cur_seq = axioms[0]
        cur = leaf(hs(cur_seq))
        for ax in axioms[1:]:
            new_seq = merge(cur_seq, ax)
            cur = node(
                hs(new_seq),
                RuleApplication("mix", comp=0, seq_a=cur_seq, seq_b=ax),
                cur,
                leaf(hs(ax)),
            )
            cur_seq = new_seq
    else:
        cur_seq = seq([], [])
        cur = leaf(hs(cur_seq))
    for f in leftovers:
        cur_seq = cur_seq.extended(ant=[f])
        cur = node(
            hs(cur_seq),
            RuleApplication("wl", comp=0, side="L", slot=len(cur_seq.ant) - 1),
            cur,
        )

    def build(ps):
        if len(ps) == 1:
            return cur
        sub = build([merge(ps[0], ps[1])] + ps[2:])
        return node(
            Hypersequent(tuple(ps)),
            RuleApplication("split", comp=0, comp2=1),
            sub,
        )

    tree = build(parts)

    have = Counter(tree.root.comps)
    want = Counter(h_at.comps)
    for s_val in sorted(set(have) | set(want), key=str):
        while have[s_val] > want[s_val]:
            concl = tree.root.without(tuple(tree.root.comps).index(s_val))
            k = tuple(concl.comps).index(s_val)
            tree = node(concl, RuleApplication("ec", comp=k), tree)
            have[s_val] -= 1
        while have[s_val] < want[s_val]:
            concl = tree.root.extended(s_val)
            tree = node(
                concl, RuleApplication("ew", comp=len(concl.comps) - 1), tree
            )
            have[s_val] += 1
    if Counter(tree.root.comps) != Counter(h_at.comps):
        raise TransformError("realization produced the wrong root")
    return assert_checks(tree, calc)


def _mask_for(stored: tuple, part2) -> tuple:
    """Booleans marking positions of `stored` forming the multiset
    `part2` (True = second part)."""
    need = Counter(part2)
    out = []
    for f in stored:
        if need[f] > 0:
            need[f] -= 1
            out.append(True)
        else:
            out.append(False)
    if +need:
        raise TransformError("component cannot be split as requested")
    return tuple(out)


def gla_to_g0(pf: ProofTree) -> ProofTree:
    """Replay a GL proof in the plain cumulative calculus: schematic
    axioms become derived identities, structural rules become the
    admissible transforms, logical rules gain their conclusion copy by
    external weakening."""
    from .syntax import ZERO

    def go(n: ProofTree) -> ProofTree:
        root = n.root
        if n.app is None:
            s = root.comps[0]
            if s.is_atomic():
                return leaf(root)
            if s.ant == (ZERO,):
                return derive_zero_left(s.suc[0])
            return derive_id(s.suc[0])
        app = n.app
        r = app.rule
        if r == "ew":
            return weaken_ext(go(n.children[0]), G0, root.comps[app.comp])
        if r == "ec":
            return contract_value(go(n.children[0]), G0, root.comps[app.comp])
        if r == "wl":
            s = root.comps[app.comp]
            f = s.ant[app.slot]
            d = go(n.children[0])
            idx = tuple(d.root.comps).index(s.without("L", app.slot))
            return weaken_left(d, G0, idx, f)
        if r == "split":
            lo, hi = sorted((app.comp, app.comp2))
            c_lo, c_hi = root.comps[lo], root.comps[hi]
            d = go(n.children[0])
            merged = merge(c_lo, c_hi)
            idx = tuple(d.root.comps).index(merged)
            stored = d.root.comps[idx]
            mask = (
                _mask_for(stored.ant, c_hi.ant),
                _mask_for(stored.suc, c_hi.suc),
            )
            return split_walk(d, G0, {idx: mask})
        if r == "mix":
            d1 = go(n.children[0])
            d2 = go(n.children[1])
            i1 = tuple(d1.root.comps).index(app.seq_a)
            i2 = tuple(d2.root.comps).index(app.seq_b)
            return mix(d1, d2, G0, i1, i2)
        if r in LOGICAL_RULES:
            s = root.comps[app.comp]
            extras = (s,)
            if r == "impl_left":
                extras = (s, s.without("L", app.slot))
            kids = []
            for c in n.children:
                kids.append(weaken_ext(go(c), G0, *extras))
            return node(root, app, *kids)
        raise TransformError("rule %r is not a GL rule" % (r,))

    out = go(pf)
    out = canonicalize(out, G0)
    return assert_checks(out, G0)


def g0_to_gla(pf: ProofTree, calc: CalculusId = GL) -> ProofTree:
    """Replay a plain cumulative proof in the structural-rule calculus:
    axiom leaves go through the atomic completeness construction plus
    external weakenings, and each cumulative rule becomes its in-place
    counterpart under enough contractions."""
    from .syntax import atomic_part

    def ec_down(tree: ProofTree, concl: Hypersequent, k: int) -> ProofTree:
        return node(concl, RuleApplication("ec", comp=k), tree)

    def go(n: ProofTree) -> ProofTree:
        root = n.root
        if n.app is None:
            at = atomic_part(root)
            tree = atomic_completeness_gla(at, calc)
            for c in root.comps:
                if not c.is_atomic():
                    concl = tree.root.extended(c)
                    tree = node(
                        concl,
                        RuleApplication("ew", comp=len(concl.comps) - 1),
                        tree,
                    )
            return tree
        app = n.app
        r = app.rule
        if r not in LOGICAL_RULES:
            raise TransformError("rule %r is not a plain cumulative rule" % (r,))
        i = app.comp
        s = root.comps[i]
        last = len(root.comps)
        up = root.extended(s)  # concl of the final (ec)
        inner = replace(app, comp=last)
        if r == "impl_left":
            f = s.at("L", app.slot)
            base = s.without("L", app.slot)
            d = go(n.children[0])
            added = base.extended(ant=[f])
            c_impl = Hypersequent(root.comps + (base, added))
            t = node(
                c_impl,
                RuleApplication(
                    "impl_left", comp=last + 1, side="L", slot=len(base.ant)
                ),
                d,
            )
            c_wl = Hypersequent(root.comps + (added, added))
            t = node(
                c_wl,
                RuleApplication("wl", comp=last, side="L", slot=len(base.ant)),
                t,
            )
            t = ec_down(t, up, last)
            return ec_down(t, root, i)
        if r == "impl_right":
            d1 = go(n.children[0])
            d2 = go(n.children[1])
            t = node(up, inner, d1, d2)
            return ec_down(t, root, i)
        # one-premise quantifier rules
        d = go(n.children[0])
        t = node(up, inner, d)
        return ec_down(t, root, i)

    out = go(pf)
    return assert_checks(out, calc)


# ------------------------------------ splitting a component in two


def _split_seq(s: Sequent, mask) -> tuple:
    """mask = (ant bools, suc bools); True sends a position to the
    second part."""
    ma, ms = mask
    a1 = tuple(f for f, b in zip(s.ant, ma) if not b)
    a2 = tuple(f for f, b in zip(s.ant, ma) if b)
    s1 = tuple(f for f, b in zip(s.suc, ms) if not b)
    s2 = tuple(f for f, b in zip(s.suc, ms) if b)
    return Sequent(a1, s1), Sequent(a2, s2)


def _mask_without(mask, side: str, slot: int):
    ma, ms = mask
    if side == "L":
        return (ma[:slot] + ma[slot + 1 :], ms)
    return (ma, ms[:slot] + ms[slot + 1 :])


def _mask_extended(mask, ant=(), suc=()):
    ma, ms = mask
    return (ma + tuple(ant), ms + tuple(suc))


def split_walk(
    pf: ProofTree,
    calc: CalculusId,
    splits: dict,
    repair_budget: int = 200,
) -> ProofTree:
    """From a proof of H make a proof of H with chosen components each
    replaced by two: splits maps a root component index to a mask
    (ant booleans, suc booleans) sending the True positions to a new
    component appended at the end.

    Semantically this strengthens the hypersequent, so it is only used
    where the caller has arranged the leaves to stay valid; any that
    fail are reproved by bounded search.
    """
    if calc.base not in ("G0", "G1hat", "G1"):
        raise TransformError("split_walk wants a cumulative base calculus")
    pf = canonicalize(pf, calc)

    def new_root_of(root: Hypersequent, marks: dict) -> Hypersequent:
        comps = list(root.comps)
        tail = []
        for k in sorted(marks):
            p1, p2 = _split_seq(root.comps[k], marks[k])
            comps[k] = p1
            tail.append(p2)
        return Hypersequent(tuple(comps) + tuple(tail))

    def part2_pos(root, marks, k) -> int:
        return len(root.comps) + sorted(marks).index(k)

    def go(n: ProofTree, marks: dict) -> ProofTree:
        for k, (ma, ms) in marks.items():
            s = n.root.comps[k]
            if len(ma) != len(s.ant) or len(ms) != len(s.suc):
                raise TransformError("split mask out of step with component")
        new_root = new_root_of(n.root, marks)
        if n.app is None:
            return leaf(new_root)
        app = n.app
        n_comps = len(n.root.comps)
        if app.comp not in marks:
            kids = tuple(go(c, marks) for c in n.children)
            return node(new_root, app, *kids)
        # the rule acts on a split component: its new principal is the
        # part holding the principal formula; the old extras carry the
        # other part's material too, which after the recursive split
        # duplicates a conclusion part and gets contracted away
        mask = marks[app.comp]
        if app.slot is not None:
            in_part2 = mask[0][app.slot] if app.side == "L" else mask[1][app.slot]
            row = mask[0] if app.side == "L" else mask[1]
            new_slot = sum(1 for b in row[: app.slot] if b == in_part2)
            new_comp = part2_pos(n.root, marks, app.comp) if in_part2 else app.comp
        else:  # ccan keeps its principal whole, in the first part
            in_part2 = False
            new_slot, new_comp = app.slot, app.comp
        derived = _derived_split_marks(calc, app, mask, in_part2)
        kids = []
        for k, c in enumerate(n.children):
            entries = derived.get(k, [])
            cm = dict(marks)
            for off, m in entries:
                cm[n_comps + off] = m
            sub = go(c, cm)
            # each tracked extra splits in two; the half on the side away
            # from the principal duplicates the matching half of the split
            # conclusion component, so drop one copy of its value
            for off, m in entries:
                p1x, p2x = _split_seq(c.root.comps[n_comps + off], m)
                sub = contract_value(sub, calc, p1x if in_part2 else p2x)
            kids.append(sub)
        return node(new_root, replace(app, comp=new_comp, slot=new_slot), *kids)

    out = go(pf, dict(splits))
    return repair_leaves(out, calc, repair_budget)


def _derived_split_marks(calc, app, mask, in_part2):
    """Masks inherited by the components each premise derives from its
    split principal, child index -> [(extra offset, mask)].  New
    formulas follow the part holding the principal formula."""
    r = app.rule
    side, slot = app.side, app.slot
    if r in ("ccan", "lccan"):
        return {0: [(0, _mask_extended(mask, ant=[False], suc=[False]))]}
    base = _mask_without(mask, side, slot)
    if r == "impl_left":
        if calc.base in ("G1hat", "G1"):
            # extra 1 gains the fresh spvar; extra 2 is a fresh component
            return {0: [(0, _mask_extended(base, ant=[in_part2]))]}
        return {
            0: [
                (0, base),
                (1, _mask_extended(base, ant=[in_part2], suc=[in_part2])),
            ]
        }
    if r == "impl_right":
        return {
            0: [(0, base)],
            1: [(0, _mask_extended(base, ant=[in_part2], suc=[in_part2]))],
        }
    if r in ("all_left", "all_right", "ex_left", "ex_right"):
        # the instance replaces the quantified formula in place
        return {0: [(0, mask)]}
    raise TransformError("split_walk cannot pass rule %r" % (r,))


# ------------------------------------------ implication-left conversion


def g0_to_g1hat(pf: ProofTree) -> ProofTree:
    """Rewrite a G0 proof into a G1hat proof of the same hypersequent.

    Every rule except implication-left is shared, so the work is local:
    where the G0 rule appended (G => D) and (G, B => A, D), the G1hat
    rule wants (G, sp => D) and (B => sp, A) for a fresh sp.  The
    converted subtree is adjusted by merging sp into both sides of the
    second component, splitting it into the two new components, merging
    sp into the antecedent of the first, and contracting the duplicate
    this creates.
    """
    pf = canonicalize(pf, G0)

    def go(n: ProofTree) -> ProofTree:
        if n.app is None:
            return leaf(n.root)
        kids = [go(c) for c in n.children]
        if n.app.rule != "impl_left":
            return node(n.root, n.app, *kids)
        concl = n.root
        s = concl.comps[n.app.comp]
        f = s.at("L", n.app.slot)
        d = kids[0]
        sp = NameSupply([concl, *(x.root for x in _all_nodes(d))]).fresh_spvar(1)
        n_c = len(concl.comps)
        base = s.without("L", n.app.slot)
        # second extra is (base.ant, B => D, A) and gains sp on both sides
        d1 = merge_walk(d, G1HAT, {n_c + 1: seq((sp,), (sp,))})
        mask_ant = (False,) * len(base.ant) + (True, False)  # B moves out
        mask_suc = (False,) * len(base.suc) + (True, True)  # A and sp move out
        d2 = split_walk(d1, G1HAT, {n_c + 1: (mask_ant, mask_suc)})
        d3 = merge_walk(d2, G1HAT, {n_c: seq((sp,), ())})
        d4 = contract_ext(d3, G1HAT, n_c, n_c + 1)
        return node(concl, replace(n.app, spvar=sp), d4)

    return assert_checks(go(pf), G1HAT)


def _all_nodes(pf: ProofTree):
    yield pf
    for c in pf.children:
        yield from _all_nodes(c)


# ------------------------------------------- eliminating density moves


def subst_param_in_proof(pf: ProofTree, a: Param, b: Param) -> ProofTree:
    """Replace parameter a by b in every node; b must be fresh for the
    whole tree."""
    if ("param", b.name) in tree_symbols(pf):
        raise TransformError("replacement parameter %s is not fresh" % (b,))
    return map_tree(pf, {a.name: b}, {})


def exchange(
    pf1: ProofTree,
    pf2: ProofTree,
    calc: CalculusId,
    cores,
    p1: Sequent,
    p2: Sequent,
) -> ProofTree:
    """Given proofs of (G | [core_i + p1]_i) and (G | [core_i + p2]_i),
    build a proof of (G | [core_i + p1]_{i<n} | core_n + p2): the last
    paired component swaps its payload.

    Realized per step k by weakening the p2-products of index > k onto
    the first proof, mixing its last p1-product with the k-th
    p2-product of the accumulating proof, splitting the merged
    component back into (core_k + p1) and (core_n + p2), and
    contracting the two duplicates this leaves."""
    cores = list(cores)
    n = len(cores)
    if n == 0:
        raise TransformError("exchange needs at least one paired component")
    prods1 = [merge(c, p1) for c in cores]
    prods2 = [merge(c, p2) for c in cores]
    have1 = Counter(pf1.root.comps) - Counter(prods1)
    have2 = Counter(pf2.root.comps) - Counter(prods2)
    if (Counter(pf1.root.comps) - have1) != Counter(prods1) or have1 != have2:
        raise TransformError("exchange inputs do not pair up")
    if n == 1:
        return pf2
    cur = weaken_ext(pf2, calc, *prods1[:-1])
    for k in range(n - 1):
        w = weaken_ext(pf1, calc, *prods2[k + 1 :])
        i = tuple(w.root.comps).index(prods1[-1])
        j = tuple(cur.root.comps).index(prods2[k])
        m = mix(w, cur, calc, i, j)
        merged = merge(prods1[-1], prods2[k])
        idx = tuple(m.root.comps).index(merged)
        part2 = merge(cores[-1], p2)
        stored = m.root.comps[idx]
        sp_ = split_walk(
            m,
            calc,
            {idx: (_mask_for(stored.ant, part2.ant), _mask_for(stored.suc, part2.suc))},
        )
        cur = contract_value(sp_, calc, prods1[k])
        cur = contract_value(cur, calc, part2)
    return cur


def gen_impl_right(
    pf1: ProofTree, pf2: ProofTree, calc: CalculusId, g_target: Hypersequent, items
) -> ProofTree:
    """Close n paired implication-right moves at once: g_target holds n
    components with A->B in the succedent (items: (position, slot));
    pf1 proves g_target plus the reduced components, pf2 proves it plus
    the components with A, B moved across.  Induction swaps the last
    pair via exchange and applies the rule twice per step."""
    items = list(items)
    n = len(items)
    if n == 0:
        raise TransformError("gen_impl_right needs at least one component")
    pos, slot = items[-1]
    c = g_target.comps[pos]
    f = c.at("R", slot)
    if not isinstance(f, Implies):
        raise TransformError("marked formula is not an implication")
    cores = [g_target.comps[p].without("R", sl) for p, sl in items]
    p_prime = seq([], [])
    p_second = seq([f.left], [f.right])
    app = RuleApplication("impl_right", comp=pos, side="R", slot=slot)
    if n == 1:
        return node(g_target, app, pf1, pf2)
    prods1 = [merge(cc, p_prime) for cc in cores]
    prods2 = [merge(cc, p_second) for cc in cores]
    ex1 = exchange(pf1, pf2, calc, cores, p_prime, p_second)
    concl1 = Hypersequent(g_target.comps + tuple(prods1[:-1]))
    d1 = node(concl1, app, pf1, ex1)
    ex2 = exchange(pf2, pf1, calc, cores, p_second, p_prime)
    concl2 = Hypersequent(g_target.comps + tuple(prods2[:-1]))
    d2 = node(concl2, app, ex2, pf2)
    return gen_impl_right(d1, d2, calc, g_target, items[:-1])


def _gen_quant(
    pf: ProofTree,
    calc: CalculusId,
    g_target: Hypersequent,
    items,
    a: Param,
    rule: str,
) -> ProofTree:
    """Close n paired quantifier moves sharing one eigenparameter:
    g_target holds n components with the quantified formula (items:
    (position, slot)); pf proves g_target plus the instantiated
    components, all using parameter a, which must not occur in
    g_target.  A chain of exchanges separates the parameters so the
    eigenvariable conditions hold."""
    items = list(items)
    side = "R" if rule == "all_right" else "L"
    cores = []
    insts = []
    for pos, slot in items:
        c = g_target.comps[pos]
        f = c.at(side, slot)
        if not isinstance(f, Quant):
            raise TransformError("marked formula is not quantified")
        cores.append(c.without(side, slot))
        insts.append(f)
    if occurs_in_hs(a, g_target):
        raise TransformError("eigenparameter occurs in the target")

    def prod_part(f, b):
        inst = substitute(f.body, f.var, b)
        return seq([], [inst]) if side == "R" else seq([inst], [])

    def claim(d, k):
        # d proves (G_k | [core_i + inst(a)]_{i<k}); returns the proof
        # with per-index fresh parameters and the parameter list
        if k == 1:
            return d, [a]
        b = NameSupply([g_target, a, *(x.root for x in _all_nodes(d))]).fresh_param()
        db = subst_param_in_proof(d, a, b)
        ex = exchange(
            d, db, calc, cores[:k], prod_part(insts[k - 1], a), prod_part(insts[k - 1], b)
        )
        sub, ps = claim(ex, k - 1)
        return sub, ps + [b]

    top, params = claim(pf, len(items))
    steps = []
    concl = g_target
    for (pos, slot), b in zip(items, params):
        app = RuleApplication(rule, comp=pos, side=side, slot=slot, param=b)
        steps.append((concl, app))
        concl = premises_of(calc, concl, app)[0]
    cur = top
    for concl_k, app_k in reversed(steps):
        cur = node(concl_k, app_k, cur)
    return cur


def gen_forall_right(pf, calc, g_target, items, a):
    return _gen_quant(pf, calc, g_target, items, a, "all_right")


def gen_exists_left(pf, calc, g_target, items, a):
    return _gen_quant(pf, calc, g_target, items, a, "ex_left")


def occurs_in_hs(a: Param, h) -> bool:
    return ("param", a.name) in symbols_of(h)


def _den_split(root: Hypersequent, sp: SpVar):
    """Partition components by the special variable: (plain, left-side,
    right-side), each entry (original index, component without sp)."""
    g, gam, pi = [], [], []
    for idx, s in enumerate(root.comps):
        na = s.ant.count(sp)
        ns = s.suc.count(sp)
        if na == 0 and ns == 0:
            g.append((idx, s))
        elif na == 1 and ns == 0:
            gam.append((idx, s.without("L", s.ant.index(sp))))
        elif na == 0 and ns == 1:
            pi.append((idx, s.without("R", s.suc.index(sp))))
        else:
            raise TransformError(
                "unsupported occurrence pattern of %s in %s" % (sp, s)
            )
    return g, gam, pi


def _den_go(n: ProofTree, sp: SpVar, calc: CalculusId) -> ProofTree:
    """The density-elimination recursion: rebuild the proof with every
    sp-left component fused to every sp-right component."""
    root = n.root
    g, gam, pi = _den_split(root, sp)
    npi = len(pi)

    def product(ci, cj):
        return merge(ci, cj)

    target = Hypersequent(
        tuple(s for _, s in g)
        + tuple(product(cg, cp) for _, cg in gam for _, cp in pi)
    )
    if n.app is None:
        return leaf(target)
    app = n.app
    s = root.comps[app.comp]
    na = s.ant.count(sp)
    ns = s.suc.count(sp)
    if na == 0 and ns == 0:
        kids = [_den_go(c, sp, calc) for c in n.children]
        gpos = [orig for orig, _ in g].index(app.comp)
        return node(target, replace(app, comp=gpos), *kids)

    # the rule acts on a component carrying sp
    if na == 1:
        mine = [orig for orig, _ in gam].index(app.comp)
        core = gam[mine][1]
        partners = [cp for _, cp in pi]
        k_sp = s.ant.index(sp)
        mate = "L"
    else:
        mine = [orig for orig, _ in pi].index(app.comp)
        core = pi[mine][1]
        partners = [cg for _, cg in gam]
        k_sp = s.suc.index(sp)
        mate = "R"

    def adj(slot, side):
        # slot in the stored component -> slot in the sp-free core
        if side == mate and slot > k_sp:
            return slot - 1
        return slot

    def prod_pos(t):
        if na == 1:
            return len(g) + mine * npi + t
        return len(g) + t * npi + mine

    def prod_slot(t, side, slot_core):
        # position of the core's slot inside product(gamma, pi)
        partner = partners[t]
        if na == 1:
            return slot_core
        off = len(partner.ant) if side == "L" else len(partner.suc)
        return off + slot_core

    r = app.rule
    if r in ("impl_left", "all_left", "ex_right", "ccan", "lccan"):
        d = _den_go(n.children[0], sp, calc)
        steps = []
        concl = target
        for t in range(len(partners)):
            slot2 = (
                prod_slot(t, app.side, adj(app.slot, app.side))
                if app.slot is not None
                else None
            )
            app2 = replace(app, comp=prod_pos(t), slot=slot2)
            steps.append((concl, app2))
            concl = premises_of(calc, concl, app2)[0]
        cur = d
        for concl_k, app_k in reversed(steps):
            cur = node(concl_k, app_k, cur)
        return cur
    if r == "impl_right":
        d1 = _den_go(n.children[0], sp, calc)
        d2 = _den_go(n.children[1], sp, calc)
        items = [
            (prod_pos(t), prod_slot(t, "R", adj(app.slot, "R")))
            for t in range(len(partners))
        ]
        return gen_impl_right(d1, d2, calc, target, items)
    if r in ("all_right", "ex_left"):
        d = _den_go(n.children[0], sp, calc)
        items = [
            (prod_pos(t), prod_slot(t, app.side, adj(app.slot, app.side)))
            for t in range(len(partners))
        ]
        if r == "all_right":
            return gen_forall_right(d, calc, target, items, app.param)
        return gen_exists_left(d, calc, target, items, app.param)
    raise TransformError("density elimination cannot pass rule %r" % (r,))


def _fresh_for(pf: ProofTree, *extra) -> NameSupply:
    return NameSupply([*(x.root for x in _all_nodes(pf)), *extra])


def _normalize_den1(pf: ProofTree, calc: CalculusId, sp: SpVar) -> ProofTree:
    """Restructure so every leaf contains an atomic (C => sp) or
    (=> sp) component: decompose an anchor component of that shape at
    the root, weakening the decomposition products onto the original
    proof.  In a cumulative calculus they then persist to every leaf."""
    anchor = None
    for s in pf.root.comps:
        if s.suc == (sp,) and len(s.ant) <= 1 and sp not in s.ant:
            anchor = s
            break
    if anchor is None:
        raise TransformError("no (C => %s) component to anchor on" % (sp,))

    def grow(h_cur, s_cur, added):
        if not s_cur.ant or is_atomic(s_cur.ant[0]):
            if s_cur.ant and isinstance(s_cur.ant[0], SpVar):
                raise TransformError(
                    "anchor decomposes to a special variable %s" % (s_cur.ant[0],)
                )
            return weaken_ext(pf, calc, *added)
        c = s_cur.ant[0]
        i = tuple(h_cur.comps).index(s_cur)
        if isinstance(c, Implies):
            app = RuleApplication("impl_left", comp=i, side="L", slot=0)
            prem = premises_of(calc, h_cur, app)[0]
            new = list(prem.comps[len(h_cur.comps):])
            # the (=> sp) component just added is already in shape
            return node(h_cur, app, weaken_ext(pf, calc, *(added + new)))
        if isinstance(c, Quant):
            a = _fresh_for(pf, h_cur).fresh_param()
            if c.kind == "forall":
                app = RuleApplication("all_left", comp=i, side="L", slot=0, term=a)
            else:
                app = RuleApplication("ex_left", comp=i, side="L", slot=0, param=a)
            prem = premises_of(calc, h_cur, app)[0]
            new = list(prem.comps[len(h_cur.comps):])
            return node(h_cur, app, grow(prem, new[0], added + new))
        raise TransformError("cannot decompose anchor formula %s" % (c,))

    return grow(pf.root, anchor, [])


def _normalize_den0(pf: ProofTree, calc: CalculusId, sp: SpVar) -> ProofTree:
    """Restructure so every leaf contains an atomic component
    (Gamma, sp => Delta) with at most one succedent formula and no
    other special variable, by decomposing an anchor (sp => C)."""
    anchor = None
    for s in pf.root.comps:
        if s.ant == (sp,) and len(s.suc) <= 1 and sp not in s.suc:
            anchor = s
            break
    if anchor is None:
        raise TransformError("no (%s => C) component to anchor on" % (sp,))

    def pick(s_cur):
        for t, f in enumerate(s_cur.ant):
            if f == sp:
                continue
            if isinstance(f, SpVar):
                raise TransformError("foreign special variable %s in anchor" % (f,))
            if not is_atomic(f):
                return "L", t, f
        for t, f in enumerate(s_cur.suc):
            if isinstance(f, SpVar):
                raise TransformError("foreign special variable %s in anchor" % (f,))
            if not is_atomic(f):
                return "R", t, f
        return None

    def grow(h_cur, s_cur, added):
        hit = pick(s_cur)
        if hit is None:
            return weaken_ext(pf, calc, *added)
        side, t, f = hit
        i = tuple(h_cur.comps).index(s_cur)
        if isinstance(f, Implies):
            if side == "L":
                app = RuleApplication("impl_left", comp=i, side="L", slot=t)
                prem = premises_of(calc, h_cur, app)[0]
                new = list(prem.comps[len(h_cur.comps):])
                return node(h_cur, app, grow(prem, new[0], added + new))
            app = RuleApplication("impl_right", comp=i, side="R", slot=t)
            prems = premises_of(calc, h_cur, app)
            kids = []
            for prem in prems:
                new = list(prem.comps[len(h_cur.comps):])
                kids.append(grow(prem, new[0], added + new))
            return node(h_cur, app, *kids)
        if isinstance(f, Quant):
            a = _fresh_for(pf, h_cur).fresh_param()
            rule = {
                ("forall", "L"): ("all_left", "term"),
                ("exists", "L"): ("ex_left", "param"),
                ("forall", "R"): ("all_right", "param"),
                ("exists", "R"): ("ex_right", "term"),
            }[(f.kind, side)]
            app = RuleApplication(
                rule[0], comp=i, side=side, slot=t, **{rule[1]: a}
            )
            prem = premises_of(calc, h_cur, app)[0]
            new = list(prem.comps[len(h_cur.comps):])
            return node(h_cur, app, grow(prem, new[0], added + new))
        raise TransformError("cannot decompose anchor formula %s" % (f,))

    return grow(pf.root, anchor, [])


def _infer_spvar(root: Hypersequent, tag: int) -> SpVar:
    found = {
        SpVar(t, i) for (kind, *rest) in symbols_of(root)
        if kind == "spvar"
        for t, i in [tuple(rest)]
        if t == tag
    }
    if len(found) != 1:
        raise TransformError(
            "expected exactly one type-%d special variable, found %d"
            % (tag, len(found))
        )
    return found.pop()


def _check_den_shape(root: Hypersequent, sp: SpVar):
    g, gam, pi = _den_split(root, sp)
    if not gam or not pi:
        raise TransformError(
            "%s must occur on both sides of the hypersequent" % (sp,)
        )


def eliminate_den1(pf: ProofTree, sp: SpVar = None, calc: CalculusId = G0) -> ProofTree:
    """From a proof of (G | [Gamma_i, sp => Delta_i] | [Pi_j => sp,
    Sigma_j]) with a type-1 special variable sp absent from G, build a
    proof of (G | [Gamma_i, Pi_j => Delta_i, Sigma_j]) pairing every i
    with every j.  Requires an anchor component (C => sp)."""
    if sp is None:
        sp = _infer_spvar(pf.root, 1)
    _check_den_shape(pf.root, sp)
    out = _den_go(_normalize_den1(pf, calc, sp), sp, calc)
    return assert_checks(out, calc)


def eliminate_den0(pf: ProofTree, sp: SpVar = None, calc: CalculusId = G0) -> ProofTree:
    """Mirror image of eliminate_den1 for a type-0 special variable,
    anchored on a component (sp => C)."""
    if sp is None:
        sp = _infer_spvar(pf.root, 0)
    _check_den_shape(pf.root, sp)
    out = _den_go(_normalize_den0(pf, calc, sp), sp, calc)
    return assert_checks(out, calc)


def eliminate_den(pf: ProofTree, sp: SpVar = None, calc: CalculusId = G0) -> ProofTree:
    """Eliminate an unbounded (type-2) special variable; no anchor or
    leaf normalization is needed since its range is unbounded on both
    sides."""
    if sp is None:
        sp = _infer_spvar(pf.root, 2)
    _check_den_shape(pf.root, sp)
    out = _den_go(pf, sp, calc)
    return assert_checks(out, calc)


# -------------------------------- cut and component cancellation


def _swap_exts(calc: CalculusId, table: dict) -> CalculusId:
    exts = frozenset(table.get(e, e) for e in calc.extensions)
    return CalculusId(calc.base, exts)


def _cut_node_via_ccan(
    concl: Hypersequent,
    app: RuleApplication,
    d1: ProofTree,
    d2: ProofTree,
    calc: CalculusId,
) -> ProofTree:
    """Assemble a cancellation-based derivation of a cut conclusion from
    proofs of the two cut premises: merge the premise components, weaken
    the conclusion component back in and cancel the cut formula."""
    i = app.comp
    s = concl.comps[i]
    m = mix(d1, d2, calc, i, i)
    w = weaken_ext(m, calc, s)
    rule = "ccan" if app.rule == "cut" else "lccan"
    return node(concl, RuleApplication(rule, comp=i, formula=app.formula), w)


def cut_to_ccan(pf: ProofTree, calc: CalculusId = None) -> ProofTree:
    """Rewrite every cut in a cumulative-calculus proof into the
    cancellation rule (and lcut into lccan)."""
    if calc is None:
        calc = G0.with_ext("cut")
    out_calc = _swap_exts(calc, {"cut": "ccan", "lcut": "lccan"})

    def go(n: ProofTree) -> ProofTree:
        if n.app is None:
            return leaf(n.root)
        kids = [go(c) for c in n.children]
        if n.app.rule in ("cut", "lcut"):
            return _cut_node_via_ccan(n.root, n.app, kids[0], kids[1], out_calc)
        return node(n.root, n.app, *kids)

    return assert_checks(go(pf), out_calc)


def ccan_to_cut(pf: ProofTree, calc: CalculusId = None) -> ProofTree:
    """Rewrite every cancellation inference in a plain cumulative proof
    into a cut on C -> C (and lccan into lcut).

    From the premise (H | G, C => C, D) an implication-left gives
    (H') = (H with the component replaced by G, C -> C => D), and a cut
    on C -> C against the one-line proof of (=> C -> C) restores H."""
    if calc is None:
        calc = G0.with_ext("ccan")
    if calc.base != "G0":
        raise TransformError("ccan_to_cut builds plain cumulative proofs")
    out_calc = _swap_exts(calc, {"ccan": "cut", "lccan": "lcut"})

    def prove_self_impl(c: Formula) -> ProofTree:
        cc = Implies(c, c)
        goal = hs(seq([], [cc]))
        d2 = weaken_ext(derive_id(c), out_calc, seq([], [cc]))
        return node(
            goal,
            RuleApplication("impl_right", comp=0, side="R", slot=0),
            leaf(hs(seq([], [cc]), seq([], []))),
            d2,
        )

    def go(n: ProofTree) -> ProofTree:
        if n.app is None:
            return leaf(n.root)
        kids = [go(c) for c in n.children]
        if n.app.rule not in ("ccan", "lccan"):
            return node(n.root, n.app, *kids)
        concl, i = n.root, n.app.comp
        s = concl.comps[i]
        c = n.app.formula
        cc = Implies(c, c)
        prem1 = weaken_ext(prove_self_impl(c), out_calc, *concl.without(i).comps)
        target = concl.replaced(i, s.extended(ant=[cc]))
        w = weaken_ext(kids[0], out_calc, s.extended(ant=[cc]))
        prem2 = node(
            target,
            RuleApplication("impl_left", comp=i, side="L", slot=len(s.ant)),
            w,
        )
        rule = "cut" if n.app.rule == "ccan" else "lcut"
        capp = RuleApplication(
            rule, comp=i, formula=cc, seq_a=seq([], []), seq_b=s
        )
        return node(concl, capp, prem1, prem2)

    return assert_checks(go(pf), out_calc)


# ------------------------------------- replaying branch-style proofs


def _replay_g3(pf: ProofTree, out_calc: CalculusId) -> ProofTree:
    def go(n: ProofTree) -> ProofTree:
        root = n.root
        if n.app is None:
            return leaf(root)
        app = n.app
        r = app.rule
        if r in ("cut", "lcut"):
            kids = [go(c) for c in n.children]
            return _cut_node_via_ccan(root, app, kids[0], kids[1], out_calc)
        i = app.comp
        s = root.comps[i]
        if r in ("impl_right", "all_right", "ex_left"):
            kids = [weaken_ext(go(c), out_calc, s) for c in n.children]
            return node(root, app, *kids)
        if r == "impl_left":
            sp = app.spvar
            f = s.at("L", app.slot)
            d = go(n.children[0])
            w = weaken_ext(d, out_calc, seq([], [sp]), seq([f], [sp]))
            mid = root.replaced(
                i, s.without("L", app.slot).extended(ant=[sp])
            ).extended(seq([f], [sp]))
            app0 = RuleApplication(
                "impl_left", comp=len(mid.comps) - 1, side="L", slot=0
            )
            t = node(mid, app0, w)
            out = eliminate_den1(t, sp, out_calc)
        elif r == "all_left":
            sp = app.spvar
            f = s.at("L", app.slot)
            d = go(n.children[0])
            mid = root.replaced(
                i, s.without("L", app.slot).extended(ant=[sp])
            ).extended(seq([f], [sp]))
            app0 = RuleApplication(
                "all_left",
                comp=len(mid.comps) - 1,
                side="L",
                slot=0,
                term=app.term,
            )
            t = node(mid, app0, d)
            out = eliminate_den1(t, sp, out_calc)
        elif r == "ex_right":
            sp = app.spvar
            f = s.at("R", app.slot)
            d = go(n.children[0])
            mid = root.replaced(
                i, s.without("R", app.slot).extended(suc=[sp])
            ).extended(seq([sp], [f]))
            app0 = RuleApplication(
                "ex_right",
                comp=len(mid.comps) - 1,
                side="R",
                slot=0,
                term=app.term,
            )
            t = node(mid, app0, d)
            out = eliminate_den0(t, sp, out_calc)
        else:
            raise TransformError("rule %r is not a branch-style rule" % (r,))
        if Counter(out.root.comps) != Counter(root.comps):
            raise TransformError("density elimination missed the target root")
        return out

    out = go(pf)
    return assert_checks(out, out_calc)


def g3_to_g0(pf: ProofTree) -> ProofTree:
    """Replay a branch-style proof in the plain cumulative calculus.

    The premise-shrinking rules keep their conclusion component by
    external weakening; the rules that move a formula across a fresh
    special variable are replayed cumulatively and the variable is then
    eliminated."""
    return _replay_g3(pf, G0)


def g3cut_to_g0ccan(pf: ProofTree) -> ProofTree:
    """Like g3_to_g0 for a branch-style proof using cut; the cuts come
    out as cancellation inferences, so the result checks in the
    cumulative calculus extended with ccan (and lccan for lcut)."""
    used = {n.app.rule for n in _all_nodes(pf) if n.app is not None}
    exts = {"ccan" for r in used if r == "cut"} | {
        "lccan" for r in used if r == "lcut"
    }
    return _replay_g3(pf, CalculusId("G0", frozenset(exts)))


# ----------------------------------------- propositional substitution


def subst_props_in_proof(
    pf: ProofTree,
    mapping: dict,
    calc: CalculusId = G0,
    budget: int = 400,
) -> ProofTree:
    """Uniformly replace nullary atoms (keyed by predicate name) with
    sentences throughout a proof.  The rule skeleton survives the
    substitution; leaves are reproved where the atomic part changed."""
    for name, g in mapping.items():
        if not is_sentence(g):
            raise TransformError(
                "replacement for %s has free variables" % (name,)
            )

    def mf(f: Formula) -> Formula:
        if isinstance(f, Atom) and not f.args and f.pred in mapping:
            return mapping[f.pred]
        if isinstance(f, Implies):
            return Implies(mf(f.left), mf(f.right))
        if isinstance(f, Quant):
            return Quant(f.kind, f.var, mf(f.body))
        return f

    def go(n: ProofTree) -> ProofTree:
        root = hs_map(n.root, mf)
        if n.app is None:
            return leaf(root)
        app = n.app
        if app.formula is not None:
            app = replace(app, formula=mf(app.formula))
        if app.seq_a is not None:
            app = replace(app, seq_a=seq_map(app.seq_a, mf))
        if app.seq_b is not None:
            app = replace(app, seq_b=seq_map(app.seq_b, mf))
        return node(root, app, *(go(c) for c in n.children))

    out = repair_leaves(go(pf), calc, budget)
    return assert_checks(out, calc)


# ------------------------------------------------------- proof metrics


def proof_stats(pf: ProofTree) -> dict:
    """Size and shape numbers for a proof tree."""
    nodes = list(_all_nodes(pf))
    rules = Counter(n.app.rule for n in nodes if n.app is not None)
    spvars, params = set(), set()
    for n in nodes:
        for sym in symbols_of(n.root):
            if sym[0] == "spvar":
                spvars.add(sym[1:])
            elif sym[0] == "param":
                params.add(sym[1])

    def height(n):
        return 1 + max((height(c) for c in n.children), default=0)

    return {
        "nodes": len(nodes),
        "leaves": sum(1 for n in nodes if n.app is None),
        "height": height(pf),
        "max_width": max(len(n.root.comps) for n in nodes),
        "spvars": len(spvars),
        "params": len(params),
        "rules": dict(sorted(rules.items())),
    }
