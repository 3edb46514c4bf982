"""Call-by-need calculus with letrec: labeling, normal-order steps, evaluation."""

from __future__ import annotations

from typing import Optional

from .outcomes import (AWHNF, CWHNF, S, T, V, W, LabelFail, Labeling, Reduced,
                       StepStuck, Whnf, run)
from .syntax import (App, Case, Constr, Expr, FreshNames, Lam, Letrec, Seq, Var,
                     freshen, replace_at, subterm)

RULES = ("lbeta", "cp-in", "cp-e", "lapp", "lcase", "lseq", "llet-in", "llet-e",
         "seq-c", "seq-in", "seq-e", "case-c", "case-in", "case-e")


def label_lr(e: Expr):
    """Run the labeling pass from the top of ``e``.

    The walk follows function, seq-first and case-scrutinee positions and
    jumps from a variable bound by the top letrec to its right-hand side.
    Jumping to an already visited binding means a cyclic dependency: Fail.
    """
    labels = {}
    if isinstance(e, Letrec):
        labels[()] = V
        index = {n: i for i, n in enumerate(e.names)}
        pos, cur = [1], e.body
    else:
        index = {}
        pos, cur = [], e
    region = None  # binding whose right-hand side we are in; None for the body
    visited = set()
    jumps = []
    while True:
        if isinstance(cur, App):
            labels[tuple(pos)] = V
            pos.append(1)
            cur = cur.fun
        elif isinstance(cur, Seq):
            labels[tuple(pos)] = V
            pos.append(1)
            cur = cur.first
        elif isinstance(cur, Case):
            labels[tuple(pos)] = V
            pos.append(1)
            cur = cur.scrut
        elif isinstance(cur, Var) and cur.name in index:
            pos = tuple(pos)
            x = cur.name
            if x in visited:
                labels[pos] = S
                return LabelFail(f"cyclic dependency through {x}", labels)
            whole_rhs = region is not None and pos == (index[region] + 2,)
            labels[pos] = W if whole_rhs else V
            jumps.append((pos, x))
            visited.add(x)
            region = x
            pos, cur = [index[x] + 2], e.bindings[index[x]][1]
        else:
            pos = tuple(pos)
            labels[pos] = S if pos else T
            return Labeling(labels, pos, cur, jumps)


def _chain_start(lab: Labeling):
    """Occurrence ``x_m`` (labeled V) at the head of the variable chain that
    ends at the binding currently in focus, plus the chain's length."""
    k = len(lab.jumps) - 1
    while lab.labels[lab.jumps[k][0]] == W:
        k -= 1
    return lab.jumps[k][0], len(lab.jumps) - k


def _insert_after(bindings, name, extra):
    out = []
    for b in bindings:
        out.append(b)
        if b[0] == name:
            out.extend(extra)
    return tuple(out)


def _set_binding(bindings, name, rhs):
    return tuple((n, rhs if n == name else r) for n, r in bindings)


def step_lr(e: Expr, fresh: Optional[FreshNames] = None):
    """One normal-order step: ``Reduced``, ``Whnf`` or ``StepStuck``."""
    fresh = fresh or FreshNames.avoiding(e)
    lab = label_lr(e)
    if not lab.ok:
        return StepStuck(f"labeling fails ({lab.reason})")
    p, node = lab.focus, lab.node
    top = e if isinstance(e, Letrec) else None

    if top is None and p == ():
        if isinstance(node, Lam):
            return Whnf(AWHNF)
        if isinstance(node, Constr):
            return Whnf(CWHNF)
        return StepStuck(f"free variable {node.name}" if isinstance(node, Var) else "no rule")

    if top is not None and len(p) == 1:
        if p == (1,):  # the body of the top letrec
            if isinstance(node, Lam):
                return Whnf(AWHNF)
            if isinstance(node, Constr):
                return Whnf(CWHNF)
            if isinstance(node, Letrec):
                return Reduced(Letrec(top.bindings + node.bindings, node.body), "llet-in", ())
            return StepStuck(f"free variable {node.name}")
        return _binding_focus(e, lab, fresh)

    pp, idx = p[:-1], p[-1]
    parent = subterm(e, pp)
    if isinstance(node, Var):
        return StepStuck(f"free variable {node.name}")
    if isinstance(node, Lam):
        if isinstance(parent, App):
            return Reduced(replace_at(e, pp, Letrec(((node.var, parent.arg),), node.body)), "lbeta", pp)
        if isinstance(parent, Seq):
            return Reduced(replace_at(e, pp, parent.second), "seq-c", pp)
        return StepStuck("abstraction in case scrutinee")
    if isinstance(node, Constr):
        if isinstance(parent, Seq):
            return Reduced(replace_at(e, pp, parent.second), "seq-c", pp)
        if isinstance(parent, Case):
            alt = parent.alt_for(node.name)
            if alt is None:
                return StepStuck(f"constructor {node.name} in case over {parent.type}")
            rhs = Letrec(tuple(zip(alt.vars, node.args)), alt.body) if node.args else alt.body
            return Reduced(replace_at(e, pp, rhs), "case-c", pp)
        return StepStuck(f"constructor {node.name} applied to an argument")
    if isinstance(node, Letrec):
        if isinstance(parent, App):
            rule, inner = "lapp", App(node.body, parent.arg)
        elif isinstance(parent, Seq):
            rule, inner = "lseq", Seq(node.body, parent.second)
        else:
            rule, inner = "lcase", Case(parent.type, node.body, parent.alts)
        return Reduced(replace_at(e, pp, Letrec(node.bindings, inner)), rule, pp)
    return StepStuck("no rule")


def _binding_focus(e: Letrec, lab: Labeling, fresh: FreshNames):
    """The walk ended at the right-hand side of binding ``x1``."""
    p, node = lab.focus, lab.node
    x1 = e.bindings[p[0] - 2][0]
    if isinstance(node, Letrec):
        bindings = _insert_after(_set_binding(e.bindings, x1, node.body), x1, node.bindings)
        return Reduced(Letrec(bindings, e.body), "llet-e", p)
    if isinstance(node, Var):
        return StepStuck(f"free variable {node.name}")
    occ, _ = _chain_start(lab)
    side = "in" if occ[0] == 1 else "e"
    if isinstance(node, Lam):
        return Reduced(replace_at(e, occ, freshen(node, fresh)), "cp-" + side, occ)
    if not isinstance(node, Constr):
        return StepStuck("no rule")
    if occ == (1,):
        return Whnf(CWHNF)
    pp = occ[:-1]
    parent = subterm(e, pp)
    if isinstance(parent, Seq):
        return Reduced(replace_at(e, pp, parent.second), "seq-" + side, pp)
    if isinstance(parent, Case):
        alt = parent.alt_for(node.name)
        if alt is None:
            return StepStuck(f"constructor {node.name} in case over {parent.type}")
        if not node.args:
            return Reduced(replace_at(e, pp, alt.body), "case-" + side, pp)
        ys = tuple(fresh() for _ in node.args)
        e2 = replace_at(e, pp, Letrec(tuple((z, Var(y)) for z, y in zip(alt.vars, ys)), alt.body))
        bindings = _set_binding(e2.bindings, x1, Constr(node.name, tuple(Var(y) for y in ys)))
        bindings = _insert_after(bindings, x1, tuple(zip(ys, node.args)))
        return Reduced(Letrec(bindings, e2.body), "case-" + side, pp)
    return StepStuck(f"constructor {node.name} applied to an argument")


def is_lr_whnf(e: Expr) -> Optional[str]:
    """``AWHNF``, ``CWHNF`` or ``None`` by the syntactic shape of ``e``."""
    if isinstance(e, Lam):
        return AWHNF
    if isinstance(e, Constr):
        return CWHNF
    if not isinstance(e, Letrec):
        return None
    if isinstance(e.body, Lam):
        return AWHNF
    if isinstance(e.body, Constr):
        return CWHNF
    env = dict(e.bindings)
    cur, seen = e.body, set()
    while isinstance(cur, Var) and cur.name in env and cur.name not in seen:
        seen.add(cur.name)
        cur = env[cur.name]
    return CWHNF if isinstance(cur, Constr) and seen else None


def evaluate_lr(e: Expr, max_steps: int = 10_000, **kw):
    """Normal-order evaluation with a step budget (see :func:`outcomes.run`)."""
    return run(step_lr, e, max_steps, **kw)


__all__ = ["label_lr", "step_lr", "evaluate_lr", "is_lr_whnf", "RULES"]
