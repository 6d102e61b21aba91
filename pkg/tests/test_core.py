import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from msdp.core import (
    Alphabet,
    Assignment,
    CompletionBound,
    Counters,
    FunctionCsf,
    InvalidAssignmentError,
    InvalidInstanceError,
    PartialAssignment,
    ProblemH,
    StageOverflowError,
    StructuredCsf,
    Verdict,
    evaluate_objective,
    extend,
    prefix_value,
)

import oracles


def always(_x):
    return True


def identity_problem():
    return ProblemH.from_function(1, Alphabet((0, 1, 2)), [1.0], lambda i, s: s, FunctionCsf(always))


def test_single_stage_identity_reward():
    assert evaluate_objective(identity_problem(), [2]) == 2.0


def test_zero_weights_give_zero():
    p = ProblemH(Alphabet.of_size(3), np.zeros(4), FunctionCsf(always), phi=np.arange(12.0).reshape(4, 3))
    for x in [(0, 0, 0, 0), (2, 1, 0, 2), (1, 1, 1, 1)]:
        assert evaluate_objective(p, x) == 0.0


def test_evaluate_caches_on_assignment():
    a = Assignment((1,))
    assert evaluate_objective(identity_problem(), a) == 1.0
    assert a.objective == 1.0


@pytest.mark.parametrize("bad", [(0, 1), (), (3,), (-1,)])
def test_invalid_assignments(bad):
    with pytest.raises(InvalidAssignmentError):
        evaluate_objective(identity_problem(), bad)


def test_masked_symbol_is_invalid():
    p = ProblemH(Alphabet.of_size(2), [1.0], FunctionCsf(always), phi=[[1.0, 2.0]], mask=[[True, False]])
    with pytest.raises(InvalidAssignmentError):
        evaluate_objective(p, (1,))


def test_first_extension():
    p = ProblemH(Alphabet.of_size(2), [2.0, 1.0], FunctionCsf(always), phi=[[1.5, 3.0], [0.0, 0.0]])
    pa = extend(PartialAssignment(), 1, p)
    assert pa.prefix == (1,) and pa.stage == 1 and pa.lam == 6.0


def test_extend_full_overflows():
    p = identity_problem()
    with pytest.raises(StageOverflowError):
        extend(PartialAssignment((0,), 0.0), 1, p)


def test_extend_rejects_foreign_symbol():
    with pytest.raises(InvalidAssignmentError):
        extend(PartialAssignment(), 5, identity_problem())


@settings(max_examples=100, deadline=None)
@given(
    st.integers(1, 6).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.floats(-5, 5, allow_nan=False), min_size=n, max_size=n),
            st.lists(st.lists(st.floats(-10, 10, allow_nan=False), min_size=3, max_size=3), min_size=n, max_size=n),
            st.lists(st.integers(0, 2), min_size=n, max_size=n),
        )
    )
)
def test_extend_chain_matches_objective(args):
    n, w, phi, x = args
    p = ProblemH(Alphabet.of_size(3), w, FunctionCsf(always), phi=phi)
    pa = PartialAssignment()
    for s in x:
        pa = extend(pa, s, p)
    assert pa.lam == evaluate_objective(p, x) == oracles.objective(p, x) == prefix_value(p, x)


def test_pair_rewards_enter_from_stage_two():
    pair = [[0.0, 5.0], [7.0, 0.0]]
    p = ProblemH(Alphabet.of_size(2), [1.0, 2.0, 1.0], FunctionCsf(always), phi=np.zeros((3, 2)), pair=pair)
    assert evaluate_objective(p, (0, 1, 0)) == 2 * 5.0 + 7.0


def test_counters_total_and_merge():
    c = Counters(3, 4)
    c.merge(Counters(1, 2))
    assert (c.csf_evals, c.acms_ops, c.total) == (4, 6, 10)
    assert c.to_dict() == {"csf": 4, "acms": 6, "total": 10}


def test_alphabet_validation():
    with pytest.raises(InvalidInstanceError):
        Alphabet(())
    with pytest.raises(InvalidInstanceError):
        Alphabet((1, 1))
    a = Alphabet(("x", "y"))
    assert a.index("y") == 1 and a.label(0) == "x"
    with pytest.raises(InvalidAssignmentError):
        a.index("z")


def test_problem_shape_checks():
    with pytest.raises(InvalidInstanceError):
        ProblemH(Alphabet.of_size(2), [], FunctionCsf(always), phi=np.zeros((0, 2)))
    with pytest.raises(InvalidInstanceError):
        ProblemH(Alphabet.of_size(2), [1.0], FunctionCsf(always), phi=np.zeros((1, 3)))
    with pytest.raises(InvalidInstanceError):
        ProblemH(Alphabet.of_size(2), [1.0], FunctionCsf(always))


def test_function_csf_defaults_to_unknown():
    csf = FunctionCsf(lambda x: sum(x) == 2)
    assert csf.partial_check((1,), 2) is Verdict.UNKNOWN
    assert csf.partial_check((1, 1), 2) is Verdict.FEASIBLE
    assert csf.partial_check((0, 1), 2) is Verdict.INFEASIBLE
    assert not csf.has_digest


@settings(max_examples=150, deadline=None)
@given(
    n=st.integers(1, 4),
    m=st.integers(1, 3),
    seed=st.integers(0, 10_000),
    ordering=st.booleans(),
    budget=st.booleans(),
    use_mask=st.booleans(),
)
def test_structured_partial_check_is_exact(n, m, seed, ordering, budget, use_mask):
    # budget/ordering/mask partial verdicts are never UNKNOWN and always agree with enumeration
    rng = np.random.default_rng(seed)
    cost = rng.integers(1, 5, (n, m)) if budget else None
    cap = int(cost.min(axis=1).sum() + rng.integers(0, 4)) if budget else None
    mask = rng.random((n, m)) < 0.8 if use_mask else None
    csf = StructuredCsf(n, m, cost=cost, capacity=cap, ordering=ordering, allowed=mask)
    p = ProblemH(Alphabet.of_size(m), np.ones(n), csf, phi=np.zeros((n, m)))

    for k in range(1, n):
        for prefix in itertools.product(range(m), repeat=k):
            v = csf.partial_check(prefix, n)
            assert v is not Verdict.UNKNOWN
            assert (v is Verdict.FEASIBLE) == oracles.has_feasible_completion(p, prefix)


def test_permutation_partial_check():
    csf = StructuredCsf(3, 4, permutation=True)
    assert csf.partial_check((1, 1), 3) is Verdict.INFEASIBLE
    assert csf.partial_check((1, 2), 3) is Verdict.FEASIBLE
    assert csf.full_check((0, 1, 2)) and not csf.full_check((0, 1, 1))
    with pytest.raises(InvalidInstanceError):
        StructuredCsf(4, 3, permutation=True)


def test_digest_separates_constraint_states():
    csf = StructuredCsf(4, 3, cost=[[1, 2, 3]] * 4, capacity=8, ordering=True)
    assert csf.digest((2, 0)) == csf.digest((2, 0))
    assert csf.digest((2, 0)) != csf.digest((1, 0))  # same last symbol, different spend


def test_budget_needs_both_parts():
    with pytest.raises(InvalidInstanceError):
        StructuredCsf(2, 2, cost=[[1, 1], [1, 1]])


def test_completion_bound_admits():
    b = CompletionBound(lambda prefix: 2.0, incumbent=10.0)
    assert b.admits((0,), 8.0)
    assert not b.admits((0,), 7.5)
