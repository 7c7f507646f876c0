"""Translate a strategy into position-indexed form against a concrete term.

The translation commits every navigation decision (guards, gates, fixed-point
unfolding, arity of the subject) against the given term, leaving a flat list
of positions and the contexts to embed there.  Applying the result to the
same term agrees with evaluating the strategy directly.
"""

from __future__ import annotations

from ctxembed.posce import FAIL_PCE, PosCE, canonicalize
from ctxembed.strategy import (
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
    mu_iterate,
)
from ctxembed.terms import App, Position, Term, arity_at_root, depth, match, merge


def psi(s: Strat, t: Term) -> PosCE:
    """Position-indexed form of ``s`` specialized to the subject ``t``."""
    if isinstance(s, SFail):
        return FAIL_PCE
    if isinstance(s, SVar):
        raise ValidationFailure(f"cannot translate open strategy (free {s.name})")
    if isinstance(s, Ins):
        return PosCE((((), s.ctx),))
    if isinstance(s, Guard):
        return psi(s.body, t) if match(s.pattern, t) is not None else FAIL_PCE
    if isinstance(s, Choice):
        left = psi(s.left, t)
        return left if not left.is_fail else psi(s.right, t)
    if isinstance(s, Mu):
        return psi(mu_iterate(s.var, s.body, depth(t)), t)
    if isinstance(s, IfThen):
        return psi(s.body, t) if not psi(s.cond, t).is_fail else FAIL_PCE
    if isinstance(s, Conj):
        return _entries(s.entries, t)
    if isinstance(s, Most):
        ar = arity_at_root(t)
        if ar == 0:
            return FAIL_PCE
        return _entries(tuple((i, s.body) for i in range(1, ar + 1)), t)
    raise TypeError(f"not a strategy: {s!r}")


def _entries(entries, t: Term) -> PosCE:
    collected: list[tuple[Position, object]] = []
    succeeded = False
    for i, body in entries:
        if i is None:
            prefix: Position = ()
            subject = t
        else:
            if not isinstance(t, App) or not 1 <= i <= len(t.args):
                continue
            prefix = (i,)
            subject = t.args[i - 1]
        sub = psi(body, subject)
        if sub.is_fail:
            continue
        succeeded = True
        collected.extend((prefix + p, c) for p, c in sub.entries)
    if not succeeded:
        return FAIL_PCE
    # entries applied later wrap the results of earlier ones at the same spot
    composed: dict[Position, object] = {}
    order: list[Position] = []
    for p, c in collected:
        if p in composed:
            composed[p] = merge(c, composed[p])
        else:
            composed[p] = c
            order.append(p)
    return canonicalize(PosCE(tuple((p, composed[p]) for p in order)))
