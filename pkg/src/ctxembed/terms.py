"""First-order terms, positions, one-hole contexts, matching and unification.

Terms are immutable trees over a signature of fixed-arity symbols, plus named
pattern variables.  Positions are tuples of 1-based child indices; the empty
tuple is the root.  A context is a term with exactly one hole; filling the
hole embeds a term, and merging two contexts nests the right one inside the
left one's hole.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Union


class PositionError(ValueError):
    """A position does not exist in the term it was applied to."""


class SignatureError(ValueError):
    """A symbol occurs with inconsistent arities, or outside the signature."""


def cached_hash(cls):
    """Compute the structural hash once per object instead of per call.

    Nodes are deep and land in caches, sets, and memo tables constantly; the
    generated dataclass hash re-walks the whole subtree every time.  Classes
    using this must declare a ``_hash`` field (default None, compare=False).
    """
    generated = cls.__hash__

    def __hash__(self):
        h = self._hash
        if h is None:
            h = generated(self)
            object.__setattr__(self, "_hash", h)
        return h

    cls.__hash__ = __hash__
    return cls


_HASH_FIELD = dict(default=None, init=False, repr=False, compare=False)


@cached_hash
@dataclass(frozen=True, slots=True)
class Var:
    """Pattern variable, written ?name."""

    name: str
    _hash: Optional[int] = field(**_HASH_FIELD)


@cached_hash
@dataclass(frozen=True, slots=True)
class App:
    """Application of a symbol to child terms; constants have no children."""

    head: str
    args: tuple["CtxTerm", ...] = ()
    _hash: Optional[int] = field(**_HASH_FIELD)


@dataclass(frozen=True, slots=True)
class Hole:
    """The unique hole of a context."""


HOLE = Hole()

Term = Union[Var, App]
CtxTerm = Union[Var, App, Hole]
Position = tuple[int, ...]
EPSILON: Position = ()

Substitution = dict[str, Term]
Signature = dict[str, int]

DEFAULT_SIGNATURE: Signature = {"a": 0, "b": 0, "f": 1, "g": 2}


# ---------------------------------------------------------------------------
# positions
# ---------------------------------------------------------------------------


def positions(t: CtxTerm) -> list[Position]:
    """All positions of ``t`` in pre-order; the root comes first."""
    out: list[Position] = []

    def walk(s: CtxTerm, here: Position) -> None:
        out.append(here)
        if isinstance(s, App):
            for i, child in enumerate(s.args, start=1):
                walk(child, here + (i,))

    walk(t, EPSILON)
    return out


def subterm(t: CtxTerm, p: Position) -> CtxTerm:
    """Subterm of ``t`` at ``p``; raises PositionError when ``p`` is absent."""
    s = t
    for i in p:
        if not isinstance(s, App) or not 1 <= i <= len(s.args):
            raise PositionError(f"no position {'.'.join(map(str, p)) or 'eps'} in term")
        s = s.args[i - 1]
    return s


def replace(t: CtxTerm, p: Position, new: CtxTerm) -> CtxTerm:
    """Copy of ``t`` with the subterm at ``p`` replaced by ``new``."""
    if not p:
        return new
    if not isinstance(t, App) or not 1 <= p[0] <= len(t.args):
        raise PositionError(f"no position {'.'.join(map(str, p))} in term")
    i = p[0] - 1
    args = t.args[:i] + (replace(t.args[i], p[1:], new),) + t.args[i + 1 :]
    return App(t.head, args)


def has_position(t: CtxTerm, p: Position) -> bool:
    try:
        subterm(t, p)
    except PositionError:
        return False
    return True


def depth(t: CtxTerm) -> int:
    """Depth of a term: 0 for variables and constants, 1+max over children."""
    if not isinstance(t, App) or not t.args:
        return 0
    return 1 + max(depth(c) for c in t.args)


def arity_at_root(t: CtxTerm) -> int:
    return len(t.args) if isinstance(t, App) else 0


def prefix_le(p: Position, q: Position) -> bool:
    """True when ``p`` is a (possibly equal) prefix of ``q``."""
    return len(p) <= len(q) and q[: len(p)] == p


def parallel(p: Position, q: Position) -> bool:
    """True when neither position prefixes the other."""
    return not prefix_le(p, q) and not prefix_le(q, p)


# ---------------------------------------------------------------------------
# matching, substitution, unification
# ---------------------------------------------------------------------------


def vars_of(t: CtxTerm) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        out: set[str] = set()
        for c in t.args:
            out |= vars_of(c)
        return out
    return set()


def match(pattern: Term, subject: Term) -> Optional[Substitution]:
    """Match ``subject`` against ``pattern``.

    Repeated variables must bind equal subterms.

    >>> match(App("g", (Var("x"), Var("x"))), App("g", (App("a"), App("b")))) is None
    True
    """
    binding: Substitution = {}

    def walk(u: Term, t: Term) -> bool:
        if isinstance(u, Var):
            seen = binding.get(u.name)
            if seen is None:
                binding[u.name] = t
                return True
            return seen == t
        if isinstance(t, App) and u.head == t.head and len(u.args) == len(t.args):
            return all(walk(uc, tc) for uc, tc in zip(u.args, t.args))
        return False

    return binding if walk(pattern, subject) else None


def substitute(t: CtxTerm, sigma: Mapping[str, Term]) -> CtxTerm:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if isinstance(t, App):
        return App(t.head, tuple(substitute(c, sigma) for c in t.args))
    return t


def _occurs(name: str, t: Term, sigma: Substitution) -> bool:
    if isinstance(t, Var):
        if t.name == name:
            return True
        bound = sigma.get(t.name)
        return bound is not None and _occurs(name, bound, sigma)
    return any(_occurs(name, c, sigma) for c in t.args)


def _resolve(t: Term, sigma: Substitution) -> Term:
    while isinstance(t, Var) and t.name in sigma:
        t = sigma[t.name]
    return t


def mgu(t1: Term, t2: Term) -> Optional[Substitution]:
    """Most general unifier of two terms, with occurs check.

    >>> mgu(Var("x"), App("f", (Var("x"),))) is None
    True
    """
    sigma: Substitution = {}
    work = [(t1, t2)]
    while work:
        u, v = work.pop()
        u, v = _resolve(u, sigma), _resolve(v, sigma)
        if u == v:
            continue
        if isinstance(u, Var):
            if _occurs(u.name, v, sigma):
                return None
            sigma[u.name] = v
        elif isinstance(v, Var):
            if _occurs(v.name, u, sigma):
                return None
            sigma[v.name] = u
        elif u.head == v.head and len(u.args) == len(v.args):
            work.extend(zip(u.args, v.args))
        else:
            return None
    return {name: substitute(t, sigma) for name, t in _ground_closure(sigma)}


def _ground_closure(sigma: Substitution) -> Iterator[tuple[str, Term]]:
    for name, t in sigma.items():
        out = substitute(t, sigma)
        while out != t:
            t, out = out, substitute(out, sigma)
        yield name, t


# ---------------------------------------------------------------------------
# contexts
# ---------------------------------------------------------------------------


def _hole_count(t: CtxTerm) -> int:
    if isinstance(t, Hole):
        return 1
    if isinstance(t, App):
        return sum(_hole_count(c) for c in t.args)
    return 0


@cached_hash
@dataclass(frozen=True, slots=True)
class Context:
    """A term with exactly one hole."""

    body: CtxTerm
    _hash: Optional[int] = field(**_HASH_FIELD)

    def __post_init__(self) -> None:
        n = _hole_count(self.body)
        if n != 1:
            raise ValueError(f"context must contain exactly one hole, found {n}")

    @property
    def hole_position(self) -> Position:
        def find(t: CtxTerm, here: Position) -> Optional[Position]:
            if isinstance(t, Hole):
                return here
            if isinstance(t, App):
                for i, c in enumerate(t.args, start=1):
                    got = find(c, here + (i,))
                    if got is not None:
                        return got
            return None

        found = find(self.body, EPSILON)
        assert found is not None
        return found

    def fill(self, t: Term) -> Term:
        """Embed ``t`` at the hole."""
        return replace(self.body, self.hole_position, t)


BOX = Context(HOLE)


class MergePolicy(enum.Enum):
    """How two contexts combine when both insert at the same place."""

    NEST = "nest"
    LEFT_PROJECT = "leftproject"


def merge(left: Context, right: Context, policy: MergePolicy = MergePolicy.NEST) -> Context:
    """Merge two contexts.

    Under NEST the right context is plugged into the left one's hole, so the
    left context ends up outermost:

    >>> li = Context(App("list", (HOLE, App("i"))))
    >>> lj = Context(App("list", (HOLE, App("j"))))
    >>> merge(li, lj).body == App("list", (App("list", (HOLE, App("j"))), App("i")))
    True

    LEFT_PROJECT keeps the left context unchanged; it is the degenerate
    idempotent merge used to exercise the algebraic laws.
    """
    if policy is MergePolicy.LEFT_PROJECT:
        return left
    return Context(replace(left.body, left.hole_position, right.body))


# ---------------------------------------------------------------------------
# signatures
# ---------------------------------------------------------------------------


def infer_signature(terms: Iterable[CtxTerm], base: Optional[Signature] = None) -> Signature:
    """Collect symbol arities from ``terms``, rejecting inconsistent use."""
    sig: Signature = dict(base) if base else {}

    def walk(t: CtxTerm) -> None:
        if isinstance(t, App):
            seen = sig.get(t.head)
            if seen is None:
                sig[t.head] = len(t.args)
            elif seen != len(t.args):
                raise SignatureError(
                    f"symbol {t.head!r} used with arities {seen} and {len(t.args)}"
                )
            for c in t.args:
                walk(c)

    for t in terms:
        walk(t)
    return sig


def max_arity(sig: Signature) -> int:
    return max(sig.values(), default=0)


def check_signature(t: CtxTerm, sig: Signature) -> None:
    """Raise SignatureError when ``t`` uses a symbol outside ``sig``."""
    if isinstance(t, App):
        if sig.get(t.head) != len(t.args):
            raise SignatureError(
                f"symbol {t.head!r}/{len(t.args)} is not in the signature"
            )
        for c in t.args:
            check_signature(c, sig)


def terms_up_to_depth(sig: Signature, n: int) -> list[Term]:
    """Every ground term of depth <= n, in a deterministic order."""
    by_symbol = sorted(sig.items())
    levels: list[list[Term]] = [[App(name) for name, ar in by_symbol if ar == 0]]
    for _ in range(n):
        prev = levels[-1]
        nxt: list[Term] = []
        for name, ar in by_symbol:
            if ar == 0:
                continue
            stacks: list[tuple[Term, ...]] = [()]
            for _ in range(ar):
                stacks = [s + (t,) for s in stacks for t in prev]
            nxt.extend(App(name, s) for s in stacks)
        levels.append(prev + nxt)
    seen: set[Term] = set()
    out: list[Term] = []
    for t in levels[-1]:
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out
