"""Prioritized reduction system for unifying and combining strategies.

``unify(S, R)`` builds a single strategy that, where both inputs succeed,
performs the work of both (contexts merged inside-out, left outermost), and
fails elsewhere.  ``combine(S, R)`` additionally falls back to either input
alone.  The reduction works on trees containing ``Pending`` nodes (a pair of
strategies waiting to be unified plus a memory of already-opened fixed-point
pairs); rules fire by strict priority on the leftmost-outermost pending node,
so reduction is deterministic.

Termination is enforced, not assumed: every step asserts that the measure

    (lambda, delta(left), delta(right))

strictly decreases from the focused node to every pending node it creates,
where lambda counts not-yet-opened fixed-point pairs (closure sizes minus the
memory entries still relevant to the pair) and delta is the (star height,
tree depth) pair.  A violation raises ``EngineError`` instead of looping.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from ctxembed.strategy import (
    FAIL_S,
    Choice,
    Conj,
    Guard,
    IfThen,
    Ins,
    Most,
    Mu,
    SFail,
    Strat,
    SVar,
    ValidationFailure,
    alpha_rename,
    bound_vars,
    delta,
    free_vars,
    simplify as simplify_strategy,
    subst_var,
    validate,
)
from ctxembed.terms import DEFAULT_SIGNATURE, MergePolicy, Signature, max_arity, merge


class EngineError(RuntimeError):
    """The reduction system violated one of its own invariants."""


_FRESH_PREFIX = "Z#"
_PHI_CAP = 100_000
_MAX_STEPS = 1_000_000


@dataclass(frozen=True, slots=True)
class Pending:
    """A pair of strategies awaiting unification, with fixed-point memory."""

    left: Strat
    right: Strat
    memory: frozenset


# ---------------------------------------------------------------------------
# closures
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def phi(s: Strat) -> frozenset:
    """All strategies reachable by the reduction from ``s`` on one side.

    Fixed points contribute both their body and their one-step unfolding;
    the result is finite because unfolding only ever reintroduces ``s``.
    """
    seen: set = set()
    work = [s]
    while work:
        node = work.pop()
        if node in seen:
            continue
        seen.add(node)
        if len(seen) > _PHI_CAP:
            raise EngineError("closure exceeded size cap")
        if isinstance(node, Guard) or isinstance(node, Most):
            work.append(node.body)
        elif isinstance(node, Choice):
            work.append(node.left)
            work.append(node.right)
        elif isinstance(node, Conj):
            work.extend(b for _, b in node.entries)
        elif isinstance(node, IfThen):
            work.append(node.cond)
            work.append(node.body)
        elif isinstance(node, Mu):
            work.append(node.body)
            work.append(subst_var(node.body, node.var, node))
    return frozenset(seen)


@lru_cache(maxsize=None)
def phi_mu(s: Strat) -> frozenset:
    """Syntactic fixed-point subterms (binder bodies are not unfolded)."""
    if isinstance(s, Mu):
        return frozenset({s}) | phi_mu(s.body)
    if isinstance(s, Guard) or isinstance(s, Most):
        return phi_mu(s.body)
    if isinstance(s, Choice):
        return phi_mu(s.left) | phi_mu(s.right)
    if isinstance(s, Conj):
        out: frozenset = frozenset()
        for _, b in s.entries:
            out |= phi_mu(b)
        return out
    if isinstance(s, IfThen):
        return phi_mu(s.cond) | phi_mu(s.body)
    return frozenset()


def phi_mu_star(s: Strat) -> frozenset:
    """Fixed-point elements of the reduction closure of ``s``."""
    return frozenset(x for x in phi(s) if isinstance(x, Mu))


def _measure(p: Pending) -> tuple[int, tuple[int, int], tuple[int, int]]:
    phi_l, phi_r = phi(p.left), phi(p.right)
    mu_l = frozenset(x for x in phi_l if isinstance(x, Mu))
    mu_r = frozenset(x for x in phi_r if isinstance(x, Mu))
    products = len(mu_l) * len(phi_r) + len(phi_l) * len(mu_r)
    relevant = 0
    for a, b, _ in p.memory:
        if (a in mu_l and b in phi_r and not isinstance(b, SVar)) or (
            a in phi_l and not isinstance(a, SVar) and b in mu_r
        ):
            relevant += 1
    return (products - relevant, delta(p.left), delta(p.right))


# ---------------------------------------------------------------------------
# rule machinery
# ---------------------------------------------------------------------------


def _never_fails(s: Strat) -> bool:
    if isinstance(s, Ins):
        return True
    if isinstance(s, Conj):
        return any(i is None and _never_fails(b) for i, b in s.entries)
    if isinstance(s, Choice):
        return _never_fails(s.left) or _never_fails(s.right)
    if isinstance(s, IfThen):
        return _never_fails(s.cond) and _never_fails(s.body)
    return False


def _gate(conds: list[Strat], body: Strat) -> Strat:
    for cond in reversed([c for c in conds if not _never_fails(c)]):
        body = IfThen(cond, body)
    return body


def _as_conj(s: Strat) -> Conj:
    if isinstance(s, Conj):
        return s
    return Conj(((None, s),))


class _Engine:
    def __init__(self, policy: MergePolicy, arity_bound: int):
        self.policy = policy
        self.arity_bound = arity_bound
        self.counter = 0
        self.spawned: list[Pending] = []

    def fresh(self) -> str:
        name = f"{_FRESH_PREFIX}{self.counter}"
        self.counter += 1
        return name

    def pend(self, left: Strat, right: Strat, mem: frozenset) -> Pending:
        """Every rule opens sub-problems through here so the reduction loop
        can assert the measure drops on each one."""
        p = Pending(left, right, mem)
        self.spawned.append(p)
        return p

    def expand_most(self, m: Most) -> Conj:
        return Conj(tuple((i, m.body) for i in range(1, self.arity_bound + 1)))

    def combine_conjs(
        self, sc: Conj, rc: Conj, mem: frozenset, orig_s: Strat, orig_r: Strat
    ) -> Strat:
        l_num = [(i, b) for i, b in sc.entries if i is not None]
        r_num = [(j, b) for j, b in rc.entries if j is not None]
        l_eps = [b for i, b in sc.entries if i is None]
        r_eps = [b for j, b in rc.entries if j is None]
        lmap, rmap = dict(l_num), dict(r_num)
        out: list[tuple[Optional[int], Strat]] = []
        for i, b in l_num:
            if i in rmap:
                out.append((i, Choice(Choice(self.pend(b, rmap[i], mem), b), rmap[i])))
        for i, b in l_num:
            if i not in rmap:
                out.append((i, b))
        for j, b in r_num:
            if j not in lmap:
                out.append((j, b))
        if l_eps and r_eps:
            out.append((None, Ins(merge(l_eps[0].ctx, r_eps[0].ctx, self.policy))))
        elif l_eps:
            out.append((None, l_eps[0]))
        elif r_eps:
            out.append((None, r_eps[0]))
        return _gate([orig_s, orig_r], Conj(tuple(out)))

    def step(self, p: Pending) -> tuple[str, Strat]:
        s, r, mem = p.left, p.right, p.memory
        if isinstance(s, SFail):
            return "1a", FAIL_S
        if isinstance(r, SFail):
            return "1b", FAIL_S
        if isinstance(s, Ins) and isinstance(r, Ins):
            return "2", Ins(merge(s.ctx, r.ctx, self.policy))
        if isinstance(s, Guard):
            return "3a", Guard(s.pattern, self.pend(s.body, r, mem))
        if isinstance(r, Guard):
            return "3b", Guard(r.pattern, self.pend(s, r.body, mem))
        if isinstance(s, Conj) and isinstance(r, Conj):
            if (
                len(s.entries) == 1
                and len(r.entries) == 1
                and s.entries[0][0] is not None
                and s.entries[0][0] == r.entries[0][0]
            ):
                i, sb = s.entries[0]
                _, rb = r.entries[0]
                return "4a", Conj(((i, self.pend(sb, rb, mem)),))
            return "4b", self.combine_conjs(s, r, mem, s, r)
        if isinstance(s, Ins) and isinstance(r, Conj):
            return "4b", self.combine_conjs(_as_conj(s), r, mem, s, r)
        if isinstance(s, Conj) and isinstance(r, Ins):
            return "4b", self.combine_conjs(s, _as_conj(r), mem, s, r)
        if isinstance(s, Choice):
            return "5a", Choice(self.pend(s.left, r, mem), self.pend(s.right, r, mem))
        if isinstance(r, Choice):
            return "5b", Choice(self.pend(s, r.left, mem), self.pend(s, r.right, mem))
        if isinstance(s, IfThen):
            return "6a", IfThen(s.cond, self.pend(s.body, r, mem))
        if isinstance(r, IfThen):
            return "6b", IfThen(r.cond, self.pend(s, r.body, mem))
        if isinstance(s, Most) and isinstance(r, Most):
            inner = Choice(Choice(self.pend(s.body, r.body, mem), s.body), r.body)
            return "7a", _gate([s, r], Most(inner))
        if isinstance(s, Most) and isinstance(r, (Conj, Ins)):
            if self.arity_bound == 0:
                return "7b", FAIL_S
            return "7b", self.combine_conjs(self.expand_most(s), _as_conj(r), mem, s, r)
        if isinstance(s, (Conj, Ins)) and isinstance(r, Most):
            if self.arity_bound == 0:
                return "7c", FAIL_S
            return "7c", self.combine_conjs(_as_conj(s), self.expand_most(r), mem, s, r)
        if isinstance(s, Mu):
            for a, b, z in mem:
                if a == s and b == r:
                    return "8a", SVar(z)
            z = self.fresh()
            unfolded = subst_var(s.body, s.var, s)
            return "8a", Mu(z, self.pend(unfolded, r, mem | {(s, r, z)}))
        if isinstance(r, Mu):
            for a, b, z in mem:
                if a == s and b == r:
                    return "8b", SVar(z)
            z = self.fresh()
            unfolded = subst_var(r.body, r.var, r)
            return "8b", Mu(z, self.pend(s, unfolded, mem | {(s, r, z)}))
        raise EngineError(f"no rule applies to {s!r} / {r!r}")


# ---------------------------------------------------------------------------
# reduction
# ---------------------------------------------------------------------------


def _reduce(engine: _Engine, root: Pending, trace: Optional[list]) -> Strat:
    """Normalize every pending node in one depth-first pass.

    Pendings never interact (each carries its own memory), so the result does
    not depend on scheduling; descending once and rewriting in place avoids
    re-scanning the tree after every step.  Each step asserts that the
    measure of every sub-problem it opens drops strictly below the focus.
    """
    steps = 0

    def resolve(node: Pending, path: tuple[int, ...]) -> Strat:
        nonlocal steps
        out: Strat = node
        while isinstance(out, Pending):
            if steps >= _MAX_STEPS:
                raise EngineError("reduction exceeded the step cap")
            steps += 1
            focus = _measure(out)
            mem_size = len(out.memory)
            engine.spawned = []
            rule, out = engine.step(out)
            kids = [_measure(k) for k in engine.spawned]
            for kid in kids:
                if not kid < focus:
                    raise EngineError(
                        f"measure failed to decrease at rule {rule}: {focus} -> {kid}"
                    )
            if trace is not None:
                trace.append(
                    {
                        "rule": rule,
                        "path": ".".join(str(i) for i in path) if path else "eps",
                        "lambda": focus[0],
                        "dl": list(focus[1]),
                        "dr": list(focus[2]),
                        "mem": mem_size,
                        "children": [[m[0], list(m[1]), list(m[2])] for m in kids],
                    }
                )
        return descend(out, path)

    def descend(s: Strat, path: tuple[int, ...]) -> Strat:
        if isinstance(s, Pending):
            return resolve(s, path)
        if isinstance(s, Guard):
            return Guard(s.pattern, descend(s.body, path + (1,)))
        if isinstance(s, Most):
            return Most(descend(s.body, path + (1,)))
        if isinstance(s, Mu):
            return Mu(s.var, descend(s.body, path + (1,)))
        if isinstance(s, Choice):
            return Choice(descend(s.left, path + (1,)), descend(s.right, path + (2,)))
        if isinstance(s, IfThen):
            return IfThen(descend(s.cond, path + (1,)), descend(s.body, path + (2,)))
        if isinstance(s, Conj):
            return Conj(
                tuple(
                    (i, descend(b, path + (k,)))
                    for k, (i, b) in enumerate(s.entries, start=1)
                )
            )
        return s

    return resolve(root, ())


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------


def _names_in(s: Strat) -> set[str]:
    return free_vars(s) | bound_vars(s)


def _check_eps_entries(s: Strat) -> None:
    if isinstance(s, Conj):
        for i, b in s.entries:
            if i is None and not isinstance(b, Ins):
                raise ValidationFailure(
                    "conjunction entries at the root must be insertions"
                )
            _check_eps_entries(b)
    elif isinstance(s, (Guard, Most, Mu)):
        _check_eps_entries(s.body)
    elif isinstance(s, Choice):
        _check_eps_entries(s.left)
        _check_eps_entries(s.right)
    elif isinstance(s, IfThen):
        _check_eps_entries(s.cond)
        _check_eps_entries(s.body)


def _require_valid(s: Strat, side: str) -> None:
    v = validate(s)
    if not v.closed:
        raise ValidationFailure(f"{side} strategy is open: {sorted(free_vars(s))}")
    if not v.monotone:
        raise ValidationFailure(f"{side} strategy is not monotone")
    if not v.linear:
        raise ValidationFailure(f"{side} strategy is not linear")
    if not v.well_founded:
        raise ValidationFailure(f"{side} strategy has a malformed conjunction")
    _check_eps_entries(s)


def _rename_fresh(s: Strat, used: set[str]) -> Strat:
    """Give engine-generated binders readable names, in first-use order."""
    assigned: dict[str, str] = {}

    def pick() -> str:
        if "Z" not in used:
            used.add("Z")
            return "Z"
        k = 2
        while f"Z{k}" in used:
            k += 1
        used.add(f"Z{k}")
        return f"Z{k}"

    def walk(node: Strat) -> Strat:
        if isinstance(node, SVar):
            return SVar(assigned.get(node.name, node.name))
        if isinstance(node, Guard):
            return Guard(node.pattern, walk(node.body))
        if isinstance(node, Choice):
            return Choice(walk(node.left), walk(node.right))
        if isinstance(node, Mu):
            if node.var.startswith(_FRESH_PREFIX):
                assigned[node.var] = pick()
                return Mu(assigned[node.var], walk(node.body))
            return Mu(node.var, walk(node.body))
        if isinstance(node, Conj):
            return Conj(tuple((i, walk(b)) for i, b in node.entries))
        if isinstance(node, Most):
            return Most(walk(node.body))
        if isinstance(node, IfThen):
            return IfThen(walk(node.cond), walk(node.body))
        return node

    return walk(s)


def unify(
    s: Strat,
    r: Strat,
    *,
    policy: MergePolicy = MergePolicy.NEST,
    signature: Optional[Signature] = None,
    simplify_output: bool = True,
    trace: Optional[list] = None,
) -> Strat:
    """The strategy that performs both ``s`` and ``r`` where both succeed."""
    _require_valid(s, "left")
    _require_valid(r, "right")
    sig = DEFAULT_SIGNATURE if signature is None else signature
    r2 = alpha_rename(r, _names_in(s))
    engine = _Engine(policy, max_arity(sig))
    raw = _reduce(engine, Pending(s, r2, frozenset()), trace)
    used = set(_names_in(s) | _names_in(r)) | {
        n for n in _names_in(raw) if not n.startswith(_FRESH_PREFIX)
    }
    out = _rename_fresh(raw, used)
    return simplify_strategy(out) if simplify_output else out


def combine(
    s: Strat,
    r: Strat,
    *,
    policy: MergePolicy = MergePolicy.NEST,
    signature: Optional[Signature] = None,
    simplify_output: bool = True,
    trace: Optional[list] = None,
) -> Strat:
    """Both where possible, otherwise left, otherwise right."""
    u = unify(
        s, r, policy=policy, signature=signature, simplify_output=False, trace=trace
    )
    out = Choice(Choice(u, s), r)
    return simplify_strategy(out) if simplify_output else out
