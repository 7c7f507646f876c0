"""The strategy language: syntax tree, executable semantics, and measures.

A strategy navigates a subject term without changing it and embeds one-hole
contexts at the positions it reaches.  The constructors:

* ``FAIL_S``        -- the strategy that always fails
* ``SVar(X)``       -- a fixed-point variable
* ``Ins(tau)``      -- embed context ``tau`` at the current position
* ``Guard(u, S)``   -- run ``S`` when the subject matches pattern ``u``
* ``Choice(l, r)``  -- left-biased alternative
* ``Mu(X, S)``      -- fixed point; on ``t`` it iterates ``S`` depth(t) times
* ``Conj(entries)`` -- apply sub-strategies at child indices (``None`` = here),
                       skipping failures, failing only when all entries fail
* ``Most(S)``       -- apply ``S`` at every immediate child where it succeeds
* ``IfThen(c, b)``  -- run ``b`` when ``c`` would succeed

``jump(p, S)`` builds the derived form @p.S as nested single-entry
conjunctions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Optional, Union

from ctxembed.terms import (
    _HASH_FIELD,
    App,
    Context,
    Position,
    Term,
    arity_at_root,
    cached_hash,
    depth,
    match,
)


class ValidationFailure(ValueError):
    """A strategy does not satisfy a required structural property."""


@dataclass(frozen=True, slots=True)
class SFail:
    pass


@cached_hash
@dataclass(frozen=True, slots=True)
class SVar:
    name: str
    _hash: Optional[int] = field(**_HASH_FIELD)


@cached_hash
@dataclass(frozen=True, slots=True)
class Ins:
    ctx: Context
    _hash: Optional[int] = field(**_HASH_FIELD)


@cached_hash
@dataclass(frozen=True, slots=True)
class Guard:
    pattern: Term
    body: "Strat"
    _hash: Optional[int] = field(**_HASH_FIELD)


@cached_hash
@dataclass(frozen=True, slots=True)
class Choice:
    left: "Strat"
    right: "Strat"
    _hash: Optional[int] = field(**_HASH_FIELD)


@cached_hash
@dataclass(frozen=True, slots=True)
class Mu:
    var: str
    body: "Strat"
    _hash: Optional[int] = field(**_HASH_FIELD)


@cached_hash
@dataclass(frozen=True, slots=True)
class Conj:
    """Indexed entries; index None targets the current position (root)."""

    entries: tuple[tuple[Optional[int], "Strat"], ...]
    _hash: Optional[int] = field(**_HASH_FIELD)


@cached_hash
@dataclass(frozen=True, slots=True)
class Most:
    body: "Strat"
    _hash: Optional[int] = field(**_HASH_FIELD)


@cached_hash
@dataclass(frozen=True, slots=True)
class IfThen:
    cond: "Strat"
    body: "Strat"
    _hash: Optional[int] = field(**_HASH_FIELD)


Strat = Union[SFail, SVar, Ins, Guard, Choice, Mu, Conj, Most, IfThen]

FAIL_S = SFail()


def jump(p: Position, body: Strat) -> Strat:
    """The derived jump @p.S; the root position gives a single None entry."""
    if not p:
        return Conj(((None, body),))
    out = body
    for i in reversed(p):
        out = Conj(((i, out),))
    return out


# ---------------------------------------------------------------------------
# variables and substitution
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def free_vars(s: Strat) -> frozenset[str]:
    if isinstance(s, SVar):
        return frozenset({s.name})
    if isinstance(s, Guard):
        return free_vars(s.body)
    if isinstance(s, Choice):
        return free_vars(s.left) | free_vars(s.right)
    if isinstance(s, Mu):
        return free_vars(s.body) - {s.var}
    if isinstance(s, Conj):
        out: frozenset[str] = frozenset()
        for _, b in s.entries:
            out |= free_vars(b)
        return out
    if isinstance(s, Most):
        return free_vars(s.body)
    if isinstance(s, IfThen):
        return free_vars(s.cond) | free_vars(s.body)
    return frozenset()


def bound_vars(s: Strat) -> set[str]:
    if isinstance(s, Guard) or isinstance(s, Most):
        return bound_vars(s.body)
    if isinstance(s, Choice):
        return bound_vars(s.left) | bound_vars(s.right)
    if isinstance(s, Mu):
        return {s.var} | bound_vars(s.body)
    if isinstance(s, Conj):
        out: set[str] = set()
        for _, b in s.entries:
            out |= bound_vars(b)
        return out
    if isinstance(s, IfThen):
        return bound_vars(s.cond) | bound_vars(s.body)
    return set()


def subst_var(s: Strat, var: str, rep: Strat) -> Strat:
    """Replace free occurrences of ``var`` by ``rep`` (binders shadow)."""
    if isinstance(s, SVar):
        return rep if s.name == var else s
    if isinstance(s, Guard):
        return Guard(s.pattern, subst_var(s.body, var, rep))
    if isinstance(s, Choice):
        return Choice(subst_var(s.left, var, rep), subst_var(s.right, var, rep))
    if isinstance(s, Mu):
        if s.var == var:
            return s
        return Mu(s.var, subst_var(s.body, var, rep))
    if isinstance(s, Conj):
        return Conj(tuple((i, subst_var(b, var, rep)) for i, b in s.entries))
    if isinstance(s, Most):
        return Most(subst_var(s.body, var, rep))
    if isinstance(s, IfThen):
        return IfThen(subst_var(s.cond, var, rep), subst_var(s.body, var, rep))
    return s


@lru_cache(maxsize=4096)
def _iterate(var: str, body: Strat, n: int) -> Strat:
    if n <= 0:
        return FAIL_S
    return subst_var(body, var, _iterate(var, body, n - 1))


def mu_iterate(var: str, body: Strat, n: int) -> Strat:
    """The n-th iterate of a binder body: 0 is failure, n+1 substitutes n."""
    return _iterate(var, body, n)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def eval_strategy(s: Strat, t: Term) -> Optional[Term]:
    """Run a closed strategy on a term; None is failure."""
    if isinstance(s, SFail):
        return None
    if isinstance(s, SVar):
        raise ValidationFailure(f"cannot evaluate open strategy (free {s.name})")
    if isinstance(s, Ins):
        return s.ctx.fill(t)
    if isinstance(s, Guard):
        return eval_strategy(s.body, t) if match(s.pattern, t) is not None else None
    if isinstance(s, Choice):
        got = eval_strategy(s.left, t)
        return got if got is not None else eval_strategy(s.right, t)
    if isinstance(s, Mu):
        return eval_strategy(mu_iterate(s.var, s.body, depth(t)), t)
    if isinstance(s, IfThen):
        if eval_strategy(s.cond, t) is None:
            return None
        return eval_strategy(s.body, t)
    if isinstance(s, Conj):
        return _eval_conj(s.entries, t)
    if isinstance(s, Most):
        ar = arity_at_root(t)
        if ar == 0:
            return None
        return _eval_conj(tuple((i, s.body) for i in range(1, ar + 1)), t)
    raise TypeError(f"not a strategy: {s!r}")


def _entry_apply(idx: Optional[int], body: Strat, subject: Term) -> Optional[Term]:
    if idx is None:
        return eval_strategy(body, subject)
    if not isinstance(subject, App) or not 1 <= idx <= len(subject.args):
        return None
    got = eval_strategy(body, subject.args[idx - 1])
    if got is None:
        return None
    args = subject.args[: idx - 1] + (got,) + subject.args[idx:]
    return App(subject.head, args)


def _eval_conj(entries: tuple[tuple[Optional[int], Strat], ...], t: Term) -> Optional[Term]:
    # the success gate judges every entry against the unmodified input
    if all(_entry_apply(i, b, t) is None for i, b in entries):
        return None
    out = t
    for i, b in entries:
        got = _entry_apply(i, b, out)
        if got is not None:
            out = got
    return out


def td(s: Strat) -> Strat:
    """Top-down driver: try ``s`` here, else at the topmost children it fits."""
    name = "X"
    used = free_vars(s) | bound_vars(s)
    k = 2
    while name in used:
        name = f"X{k}"
        k += 1
    return Mu(name, Choice(s, Most(SVar(name))))


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Validation:
    closed: bool
    monotone: bool
    linear: bool
    well_founded: bool

    @property
    def ok(self) -> bool:
        return self.closed and self.monotone and self.linear and self.well_founded


def _monotone(s: Strat, pending: frozenset[str]) -> bool:
    """No variable in ``pending`` may occur before crossing a child index."""
    if isinstance(s, SVar):
        return s.name not in pending
    if isinstance(s, Guard):
        return _monotone(s.body, pending)
    if isinstance(s, Choice):
        return _monotone(s.left, pending) and _monotone(s.right, pending)
    if isinstance(s, Mu):
        return _monotone(s.body, pending | {s.var})
    if isinstance(s, Conj):
        return all(
            _monotone(b, frozenset() if i is not None else pending) for i, b in s.entries
        )
    if isinstance(s, Most):
        return _monotone(s.body, frozenset())
    if isinstance(s, IfThen):
        return _monotone(s.cond, pending) and _monotone(s.body, pending)
    return True


def _count_occurrences(s: Strat, var: str) -> int:
    if isinstance(s, SVar):
        return 1 if s.name == var else 0
    if isinstance(s, Guard) or isinstance(s, Most):
        return _count_occurrences(s.body, var)
    if isinstance(s, Choice):
        return _count_occurrences(s.left, var) + _count_occurrences(s.right, var)
    if isinstance(s, Mu):
        return 0 if s.var == var else _count_occurrences(s.body, var)
    if isinstance(s, Conj):
        return sum(_count_occurrences(b, var) for _, b in s.entries)
    if isinstance(s, IfThen):
        return _count_occurrences(s.cond, var) + _count_occurrences(s.body, var)
    return 0


def _linear(s: Strat) -> bool:
    if isinstance(s, Mu):
        return _count_occurrences(s.body, s.var) == 1 and _linear(s.body)
    if isinstance(s, Guard) or isinstance(s, Most):
        return _linear(s.body)
    if isinstance(s, Choice):
        return _linear(s.left) and _linear(s.right)
    if isinstance(s, Conj):
        return all(_linear(b) for _, b in s.entries)
    if isinstance(s, IfThen):
        return _linear(s.cond) and _linear(s.body)
    return True


def _well_founded(s: Strat) -> bool:
    if isinstance(s, Conj):
        idxs = [i for i, _ in s.entries]
        if len(set(idxs)) != len(idxs):
            return False
        if None in idxs and idxs.index(None) != len(idxs) - 1:
            return False
        return all(_well_founded(b) for _, b in s.entries)
    if isinstance(s, Guard) or isinstance(s, Most):
        return _well_founded(s.body)
    if isinstance(s, Choice):
        return _well_founded(s.left) and _well_founded(s.right)
    if isinstance(s, Mu):
        return _well_founded(s.body)
    if isinstance(s, IfThen):
        return _well_founded(s.cond) and _well_founded(s.body)
    return True


def validate(s: Strat) -> Validation:
    """Check the structural side conditions the reduction engine relies on."""
    return Validation(
        closed=not free_vars(s),
        monotone=_monotone(s, frozenset()),
        linear=_linear(s),
        well_founded=_well_founded(s),
    )


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def star_height(s: Strat) -> int:
    """Deepest nesting of fixed-point binders."""
    if isinstance(s, Mu):
        return 1 + star_height(s.body)
    if isinstance(s, Guard) or isinstance(s, Most):
        return star_height(s.body)
    if isinstance(s, Choice):
        return max(star_height(s.left), star_height(s.right))
    if isinstance(s, Conj):
        return max((star_height(b) for _, b in s.entries), default=0)
    if isinstance(s, IfThen):
        return max(star_height(s.cond), star_height(s.body))
    return 0


@lru_cache(maxsize=None)
def tree_depth(s: Strat) -> int:
    """Constructor depth ignoring binders; Most counts as a conjunction of jumps."""
    if isinstance(s, Ins):
        return 1
    if isinstance(s, Guard):
        return 1 + tree_depth(s.body)
    if isinstance(s, Choice):
        return 1 + max(tree_depth(s.left), tree_depth(s.right))
    if isinstance(s, Mu):
        return tree_depth(s.body)
    if isinstance(s, Conj):
        return 1 + max((tree_depth(b) for _, b in s.entries), default=0)
    if isinstance(s, Most):
        return 2 + tree_depth(s.body)
    if isinstance(s, IfThen):
        return 1 + max(tree_depth(s.cond), tree_depth(s.body))
    return 0


def delta(s: Strat) -> tuple[int, int]:
    """Lexicographic (star height, tree depth)."""
    return (star_height(s), tree_depth(s))


def pi_count(var: str, s: Strat) -> int:
    """Fewest child-index crossings on a path from the root to ``var``."""

    def walk(node: Strat) -> list[int]:
        if isinstance(node, SVar):
            return [0] if node.name == var else []
        if isinstance(node, Guard):
            return walk(node.body)
        if isinstance(node, Choice):
            return walk(node.left) + walk(node.right)
        if isinstance(node, Mu):
            return [] if node.var == var else walk(node.body)
        if isinstance(node, Conj):
            out: list[int] = []
            for i, b in node.entries:
                cost = 0 if i is None else 1
                out.extend(cost + c for c in walk(b))
            return out
        if isinstance(node, Most):
            return [1 + c for c in walk(node.body)]
        if isinstance(node, IfThen):
            return walk(node.cond) + walk(node.body)
        return []

    costs = walk(s)
    if not costs:
        raise ValueError(f"variable {var} does not occur")
    return min(costs)


# ---------------------------------------------------------------------------
# unfolding, equivalence, simplification
# ---------------------------------------------------------------------------


def unfold(s: Strat, counts: Mapping[str, int]) -> Strat:
    """Replace each binder by a finite iterate; counts maps binder names."""
    if isinstance(s, Mu):
        if s.var not in counts:
            raise KeyError(f"no unfold count for {s.var}")
        return mu_iterate(s.var, unfold(s.body, counts), counts[s.var])
    if isinstance(s, Guard):
        return Guard(s.pattern, unfold(s.body, counts))
    if isinstance(s, Choice):
        return Choice(unfold(s.left, counts), unfold(s.right, counts))
    if isinstance(s, Conj):
        return Conj(tuple((i, unfold(b, counts)) for i, b in s.entries))
    if isinstance(s, Most):
        return Most(unfold(s.body, counts))
    if isinstance(s, IfThen):
        return IfThen(unfold(s.cond, counts), unfold(s.body, counts))
    return s


def equiv_upto(s1: Strat, s2: Strat, n: int, sig: Optional[dict[str, int]] = None) -> bool:
    """Semantic equality over every term of depth <= n."""
    from ctxembed.terms import DEFAULT_SIGNATURE, terms_up_to_depth

    for t in terms_up_to_depth(sig if sig is not None else DEFAULT_SIGNATURE, n):
        if eval_strategy(s1, t) != eval_strategy(s2, t):
            return False
    return True


def fails_on_constants(s: Strat) -> bool:
    """Failure on every arity-0 term is forced by the syntax alone.

    Binders fail on constants outright (the zero iterate is the failing
    strategy), compound guard patterns cannot match a leaf, child entries and
    Most have no child to visit.  Insertions succeed and free variables are
    unknown, so both report False.
    """
    if isinstance(s, (SFail, Most, Mu)):
        return True
    if isinstance(s, Guard):
        if isinstance(s.pattern, App) and s.pattern.args:
            return True
        return fails_on_constants(s.body)
    if isinstance(s, Choice):
        return fails_on_constants(s.left) and fails_on_constants(s.right)
    if isinstance(s, Conj):
        return all(fails_on_constants(b) for i, b in s.entries if i is None)
    if isinstance(s, IfThen):
        return fails_on_constants(s.cond) or fails_on_constants(s.body)
    return False


def simplify(s: Strat) -> Strat:
    """Remove removable unused binders and prune failing alternatives.

    An unused binder only disappears when its body fails on every constant:
    the zero iterate makes every fixed point fail on arity-0 terms, so
    dropping mu from a body that succeeds there would change the semantics.
    """
    if isinstance(s, Guard):
        return Guard(s.pattern, simplify(s.body))
    if isinstance(s, Choice):
        left, right = simplify(s.left), simplify(s.right)
        if isinstance(left, SFail):
            return right
        if isinstance(right, SFail):
            return left
        return Choice(left, right)
    if isinstance(s, Mu):
        body = simplify(s.body)
        if s.var not in free_vars(body) and fails_on_constants(body):
            return body
        return Mu(s.var, body)
    if isinstance(s, Conj):
        return Conj(tuple((i, simplify(b)) for i, b in s.entries))
    if isinstance(s, Most):
        return Most(simplify(s.body))
    if isinstance(s, IfThen):
        return IfThen(simplify(s.cond), simplify(s.body))
    return s


# ---------------------------------------------------------------------------
# alpha renaming
# ---------------------------------------------------------------------------


def alpha_rename(s: Strat, avoid: set[str]) -> Strat:
    """Rename binders so no bound name lies in ``avoid``; deterministic."""
    taken = set(avoid) | free_vars(s)

    def fresh(base: str) -> str:
        if base not in taken:
            return base
        k = 2
        while f"{base}{k}" in taken:
            k += 1
        return f"{base}{k}"

    def walk(node: Strat, env: dict[str, str]) -> Strat:
        if isinstance(node, SVar):
            return SVar(env.get(node.name, node.name))
        if isinstance(node, Guard):
            return Guard(node.pattern, walk(node.body, env))
        if isinstance(node, Choice):
            return Choice(walk(node.left, env), walk(node.right, env))
        if isinstance(node, Mu):
            new = fresh(node.var)
            taken.add(new)
            inner = dict(env)
            inner[node.var] = new
            return Mu(new, walk(node.body, inner))
        if isinstance(node, Conj):
            return Conj(tuple((i, walk(b, env)) for i, b in node.entries))
        if isinstance(node, Most):
            return Most(walk(node.body, env))
        if isinstance(node, IfThen):
            return IfThen(walk(node.cond, env), walk(node.body, env))
        return node

    return walk(s, {})


def _alpha_canon(s: Strat, env: dict[str, str], counter: list[int]) -> Strat:
    if isinstance(s, SVar):
        return SVar(env.get(s.name, s.name))
    if isinstance(s, Guard):
        return Guard(s.pattern, _alpha_canon(s.body, env, counter))
    if isinstance(s, Choice):
        return Choice(_alpha_canon(s.left, env, counter), _alpha_canon(s.right, env, counter))
    if isinstance(s, Mu):
        name = f"V{counter[0]}"
        counter[0] += 1
        inner = dict(env)
        inner[s.var] = name
        return Mu(name, _alpha_canon(s.body, inner, counter))
    if isinstance(s, Conj):
        return Conj(tuple((i, _alpha_canon(b, env, counter)) for i, b in s.entries))
    if isinstance(s, Most):
        return Most(_alpha_canon(s.body, env, counter))
    if isinstance(s, IfThen):
        return IfThen(_alpha_canon(s.cond, env, counter), _alpha_canon(s.body, env, counter))
    return s


def alpha_eq(s1: Strat, s2: Strat) -> bool:
    """Equality up to consistent renaming of bound variables."""
    return _alpha_canon(s1, {}, [0]) == _alpha_canon(s2, {}, [0])
