"""Position-based insertion strategies.

A position-based strategy is either the failing strategy or a nonempty
ordered list of (position, context) entries.  Applied to a term it embeds
each context at its position, first entry first; entries whose position is
absent are skipped, and the whole application fails when no entry's position
exists in the input.

The canonical entry order is well-founded: descendants come before their
ancestors (the root last) so that an insertion never displaces the target
position of a later entry; parallel positions are ordered lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ctxembed.terms import (
    Context,
    MergePolicy,
    Position,
    Term,
    has_position,
    merge,
    parallel,
    prefix_le,
    replace,
    subterm,
)

Entry = tuple[Position, Context]


@dataclass(frozen=True, slots=True)
class PosCE:
    """Position-based strategy; an empty entry tuple is the failing strategy."""

    entries: tuple[Entry, ...] = ()

    @property
    def is_fail(self) -> bool:
        return not self.entries


FAIL_PCE = PosCE(())


def _order_key(p: Position) -> tuple:
    # strict descendants sort before their ancestors, parallel positions
    # lexicographically: append an infinite sentinel and compare
    return p + (float("inf"),)


def is_well_founded(e: PosCE) -> bool:
    """Positions pairwise distinct, with no entry preceding a descendant."""
    ps = [p for p, _ in e.entries]
    if len(set(ps)) != len(ps):
        return False
    for i, p in enumerate(ps):
        for q in ps[i + 1 :]:
            if prefix_le(p, q):
                return False
    return True


def canonicalize(e: PosCE) -> PosCE:
    """Sort entries into the canonical well-founded order."""
    return PosCE(tuple(sorted(e.entries, key=lambda en: _order_key(en[0]))))


def apply_pos_ce(e: PosCE, t: Term) -> Optional[Term]:
    """Run ``e`` on ``t``; None is failure.

    Fails when ``e`` is the failing strategy or no entry position occurs in
    ``t``; otherwise applies each entry in order, skipping entries whose
    position has disappeared from the evolving term.
    """
    if e.is_fail:
        return None
    if not any(has_position(t, p) for p, _ in e.entries):
        return None
    out = t
    for p, tau in e.entries:
        if has_position(out, p):
            out = replace(out, p, tau.fill(subterm(out, p)))
    return out


def unify_pos(left: PosCE, right: PosCE, policy: MergePolicy = MergePolicy.NEST) -> PosCE:
    """Join two insertion lists position-wise.

    Contexts at a position both sides insert at are merged with the left
    operand outermost; one-sided entries are kept.  Failure is absorbing.
    The result is canonical.
    """
    if left.is_fail or right.is_fail:
        return FAIL_PCE
    rmap = dict(right.entries)
    out: list[Entry] = []
    for p, tau in left.entries:
        other = rmap.pop(p, None)
        out.append((p, tau) if other is None else (p, merge(tau, other, policy)))
    for p, tau in right.entries:
        if p in rmap:
            out.append((p, tau))
    return canonicalize(PosCE(tuple(out)))


def combine_pos(left: PosCE, right: PosCE, policy: MergePolicy = MergePolicy.NEST) -> PosCE:
    """Like unify_pos, but failure on one side yields the other side."""
    if left.is_fail:
        return canonicalize(right)
    if right.is_fail:
        return canonicalize(left)
    return unify_pos(left, right, policy)


def eq_pos(a: PosCE, b: PosCE) -> bool:
    """Equality after canonicalization."""
    return canonicalize(a) == canonicalize(b)
