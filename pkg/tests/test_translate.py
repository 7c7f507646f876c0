"""Translating strategies into position-indexed form, term by term."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxembed.engine import combine, unify
from ctxembed.posce import FAIL_PCE, PosCE, apply_pos_ce, combine_pos, eq_pos, unify_pos
from ctxembed.strategy import (
    FAIL_S,
    Choice,
    Conj,
    Guard,
    IfThen,
    Ins,
    Most,
    Mu,
    SVar,
    ValidationFailure,
    eval_strategy,
    jump,
)
from ctxembed.terms import HOLE, App, Context, Var, merge
from ctxembed.translate import psi


def a():
    return App("a")


def b():
    return App("b")


def f(x):
    return App("f", (x,))


def g(x, y):
    return App("g", (x, y))


TAU = Context(App("list", (HOLE, App("i"))))
TAU_P = Context(App("list", (HOLE, App("j"))))
SIGMA = Context(App("f", (HOLE,)))
U = g(Var("x"), Var("x"))
U_P = g(Var("x"), b())

XI = Mu("X", Choice(Guard(U, Ins(TAU)), jump((1,), SVar("X"))))
XI_P = Mu("X'", Choice(Guard(U_P, Ins(TAU_P)), jump((1,), SVar("X'"))))


# ---------------------------------------------------------------------------
# clause-by-clause behavior
# ---------------------------------------------------------------------------


def test_failure_translates_to_failure():
    assert psi(FAIL_S, a()) == FAIL_PCE


def test_open_strategy_is_rejected():
    with pytest.raises(ValidationFailure):
        psi(SVar("X"), a())


def test_insertion_lands_at_the_root():
    assert psi(Ins(TAU), a()) == PosCE((((), TAU),))


def test_guard_consults_the_subject():
    s = Guard(U, Ins(TAU))
    assert psi(s, g(b(), b())) == PosCE((((), TAU),))
    assert psi(s, g(a(), b())) == FAIL_PCE


def test_choice_is_left_biased():
    s = Choice(Ins(TAU), Ins(TAU_P))
    assert psi(s, a()) == PosCE((((), TAU),))
    s = Choice(Guard(U, Ins(TAU)), Ins(TAU_P))
    assert psi(s, g(a(), b())) == PosCE((((), TAU_P),))


def test_jump_prefixes_positions():
    s = jump((1, 2), Ins(TAU))
    assert psi(s, g(g(a(), b()), a())) == PosCE((((1, 2), TAU),))
    assert psi(s, g(a(), b())) == FAIL_PCE
    assert psi(s, a()) == FAIL_PCE


def test_conjunction_translates_against_original_children():
    s = Conj(((1, Ins(TAU)), (2, Ins(TAU_P))))
    assert psi(s, g(a(), b())) == PosCE((((1,), TAU), ((2,), TAU_P)))
    assert psi(s, f(a())) == PosCE((((1,), TAU),))
    assert psi(s, a()) == FAIL_PCE


def test_conjunction_eps_entry_comes_last():
    s = Conj(((1, Ins(SIGMA)), (None, Ins(TAU))))
    assert psi(s, f(a())) == PosCE((((1,), SIGMA), ((), TAU)))


def test_duplicate_positions_merge_with_later_entry_outermost():
    s = Conj(((None, Ins(TAU)), (None, Ins(TAU_P))))
    assert psi(s, a()) == PosCE((((), merge(TAU_P, TAU)),))


def test_descendants_precede_ancestors_after_translation():
    s = Conj(((1, jump((2,), Ins(TAU))), (1, Ins(TAU_P))))
    got = psi(s, g(g(a(), b()), a()))
    assert got == PosCE((((1, 2), TAU), ((1,), TAU_P)))
    assert apply_pos_ce(got, g(g(a(), b()), a())) is not None


def test_most_expands_over_the_actual_arity():
    s = Most(Ins(SIGMA))
    assert psi(s, g(a(), b())) == PosCE((((1,), SIGMA), ((2,), SIGMA)))
    assert psi(s, f(a())) == PosCE((((1,), SIGMA),))
    assert psi(s, a()) == FAIL_PCE


def test_condition_gates_the_translation():
    s = IfThen(jump((1,), Ins(TAU)), Ins(TAU_P))
    assert psi(s, f(a())) == PosCE((((), TAU_P),))
    assert psi(s, a()) == FAIL_PCE


def test_fixed_point_iterates_to_the_subject_depth():
    assert psi(XI, a()) == FAIL_PCE
    assert psi(XI, g(b(), b())) == PosCE((((), TAU),))
    assert psi(XI, g(g(b(), b()), a())) == PosCE((((1,), TAU),))


# ---------------------------------------------------------------------------
# agreement with direct evaluation
# ---------------------------------------------------------------------------

AGREEMENT_CASES = [
    (Ins(TAU), a()),
    (Guard(U, Ins(TAU)), g(b(), b())),
    (Guard(U, Ins(TAU)), g(a(), b())),
    (Choice(Guard(U, Ins(TAU)), Ins(TAU_P)), g(a(), b())),
    (Conj(((1, Ins(TAU)), (2, Ins(TAU_P)))), g(a(), b())),
    (Conj(((1, Ins(TAU)), (2, Ins(TAU_P)))), f(a())),
    (Conj(((2, Ins(SIGMA)), (None, Ins(TAU)))), g(a(), b())),
    (Most(Ins(SIGMA)), g(a(), b())),
    (Most(Guard(a(), Ins(SIGMA))), g(a(), b())),
    (Most(Guard(a(), Ins(SIGMA))), g(b(), b())),
    (IfThen(jump((1,), Ins(TAU)), Most(Ins(SIGMA))), g(a(), b())),
    (XI, a()),
    (XI, g(b(), b())),
    (XI, g(g(b(), b()), a())),
    (XI, f(f(g(b(), b())))),
]


@pytest.mark.parametrize("s,t", AGREEMENT_CASES)
def test_translation_agrees_with_evaluation(s, t):
    assert apply_pos_ce(psi(s, t), t) == eval_strategy(s, t)


def test_translation_of_engine_output_agrees_on_recursive_example():
    got = unify(XI, XI_P)
    for t in [
        g(b(), b()),
        g(g(a(), b()), g(a(), b())),
        g(g(a(), a()), b()),
        g(g(b(), b()), a()),
        a(),
        f(a()),
    ]:
        assert apply_pos_ce(psi(got, t), t) == eval_strategy(got, t)


# ---------------------------------------------------------------------------
# the translation is a homomorphism for unification and combination
# ---------------------------------------------------------------------------

PAIRS = [
    (Guard(U, Ins(TAU)), Ins(TAU_P)),
    (Most(Ins(SIGMA)), Ins(TAU)),
    (Conj(((1, Ins(TAU)), (2, Ins(TAU)))), Conj(((2, Ins(TAU_P)), (1, Ins(SIGMA))))),
    (Choice(Ins(TAU), Guard(U, Ins(TAU_P))), Most(Ins(SIGMA))),
    (XI, XI_P),
]

TERMS = [a(), b(), f(a()), g(a(), b()), g(g(b(), b()), a()), g(g(a(), b()), g(a(), b()))]


@pytest.mark.parametrize("s,r", PAIRS)
def test_unify_commutes_with_translation(s, r):
    for t in TERMS:
        joint = psi(unify(s, r), t)
        pointwise = unify_pos(psi(s, t), psi(r, t))
        assert eq_pos(joint, pointwise)


@pytest.mark.parametrize("s,r", PAIRS)
def test_combine_commutes_with_translation(s, r):
    for t in TERMS:
        joint = psi(combine(s, r), t)
        pointwise = combine_pos(psi(s, t), psi(r, t))
        assert eq_pos(joint, pointwise)


# ---------------------------------------------------------------------------
# property: agreement on generated closed strategies without binders
# ---------------------------------------------------------------------------

_gterms = st.recursive(
    st.sampled_from([a(), b()]),
    lambda kids: st.builds(lambda t: f(t), kids)
    | st.builds(lambda l, r: g(l, r), kids, kids),
    max_leaves=5,
)

_patterns = st.sampled_from([a(), U, U_P, f(Var("x")), Var("x")])
_ctxs = st.sampled_from([TAU, TAU_P, SIGMA])


def _flat():
    base = st.just(FAIL_S) | st.builds(Ins, _ctxs)

    def extend(kids):
        def mk_conj(pairs, eps_body):
            seen = {}
            for i, body in pairs:
                seen[i] = body
            entries = tuple(sorted(seen.items())) + (
                ((None, eps_body),) if eps_body is not None else ()
            )
            return Conj(entries)

        conj = st.builds(
            mk_conj,
            st.lists(st.tuples(st.integers(1, 3), kids), min_size=1, max_size=3),
            st.none() | st.builds(Ins, _ctxs),
        )
        return (
            st.builds(Guard, _patterns, kids)
            | st.builds(Choice, kids, kids)
            | conj
            | st.builds(Most, kids)
            | st.builds(IfThen, kids, kids)
        )

    return st.recursive(base, extend, max_leaves=5)


@settings(max_examples=400, deadline=None)
@given(_flat(), _gterms)
def test_translation_agrees_on_generated_cases(s, t):
    assert apply_pos_ce(psi(s, t), t) == eval_strategy(s, t)
