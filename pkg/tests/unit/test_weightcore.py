import os
import sys

import numpy as np
import pytest

# Get path to root directory (two levels up from tests/)
path_to_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path += [path_to_root]

from weightlab.errors import ContractError, InputError
from weightlab.orbit import gen_jordan, gen_sl2_tensor, gen_conjugated, zero_orbit
from weightlab.qlinalg import LinMap, IncFiltration, canonicalize, full_space, shift, iterated_graded
from weightlab.weightcore import (nilpotency_index, weight_filtration, verify_weight_axioms, weight_report,
                                  jordan_block_sizes, jordan_weight_dims, key_lemma_check, zassenhaus_check,
                                  lambda_independence_check, relative_checks, verify_relative)


# Test 1: weight filtrations of single Jordan blocks and of zero
def test_weight_filtration_small_cases():
    assert weight_filtration(gen_jordan([2]).nilpotent(1)).graded_dims() == {-1: 1, 1: 1}
    assert weight_filtration(gen_jordan([3]).nilpotent(1)).graded_dims() == {-2: 1, 0: 1, 2: 1}
    assert weight_filtration(zero_orbit(3).nilpotent(1)).graded_dims() == {0: 3}
    report = weight_report(gen_jordan([3, 1]).nilpotent(1))
    assert report.is_symmetric()
    assert report.graded_dims == {-2: 1, 0: 2, 2: 1}


# Test 2: nilpotency index and its contract
def test_nilpotency_index():
    assert nilpotency_index(gen_jordan([3, 1]).nilpotent(1)) == 3
    assert nilpotency_index(LinMap.zero(2, 2)) == 1
    with pytest.raises(ContractError):
        nilpotency_index(LinMap.identity(2))
    with pytest.raises(InputError):
        nilpotency_index(LinMap.zero(2, 3))


# Test 3: a shifted filtration fails the centred axioms
def test_axioms_reject_shifted_filtration():
    N = gen_jordan([3]).nilpotent(1)
    W = weight_filtration(N)
    ok, _ = verify_weight_axioms(N, W)
    assert ok
    ok, witnesses = verify_weight_axioms(N, shift(W, 1))
    assert not ok
    assert witnesses[-1]['test'] in ('inclusion', 'bijection')


# Test 4: graded dimensions match the Jordan-form oracle on conjugated orbits
@pytest.mark.parametrize('sizes', [[2], [3], [2, 1], [3, 1], [2, 2], [4, 2, 1]])
def test_jordan_oracle_on_conjugates(sizes):
    orbit = gen_conjugated(gen_jordan(sizes), seed=sum(sizes))
    N = orbit.nilpotent(1)
    W = weight_filtration(N)
    assert jordan_block_sizes(N) == sorted(sizes, reverse=True)
    assert W.graded_dims() == jordan_weight_dims(sizes)


# Test 5: randomized Jordan types in dimension up to 12
@pytest.mark.integration
def test_jordan_oracle_randomized():
    rng = np.random.default_rng(0)
    for trial in range(50):
        sizes = []
        while sum(sizes) < 2 or (sum(sizes) < 12 and rng.random() < 0.6):
            sizes.append(int(rng.integers(1, 5)))
        while sum(sizes) > 12:
            sizes.pop()
        orbit = gen_conjugated(gen_jordan(sizes), seed=trial)
        N = orbit.nilpotent(1)
        W = weight_filtration(N)
        assert verify_weight_axioms(N, W)[0]
        assert W.graded_dims() == jordan_weight_dims(sizes)


# Test 6: W(sum lambda_j N_j) is independent of the positive weights
@pytest.mark.parametrize('sizes', [[2, 2], [2, 3]])
def test_lambda_independence(sizes):
    orbit = gen_sl2_tensor(sizes)
    assert lambda_independence_check(orbit, (1, 2), seed=1).passed


# Test 7: every part of the key lemma holds on sl2 tensor orbits
@pytest.mark.parametrize('sizes', [[2, 2], [2, 3], [3, 3]])
def test_key_lemma(sizes):
    orbit = gen_sl2_tensor(sizes)
    records = key_lemma_check(orbit, orbit.indices)
    assert [r.name for r in records] == ['keylemma.vanishing', 'keylemma.sum', 'keylemma.bounded_sum',
                                         'keylemma.partition', 'keylemma.order']
    for r in records:
        assert r.passed, r.details


# Test 8: three factors, all permutations of the order
@pytest.mark.integration
def test_key_lemma_three_factors():
    orbit = gen_sl2_tensor([2, 2, 3])
    for r in key_lemma_check(orbit, orbit.indices):
        assert r.passed, (r.name, r.details)


# Test 9: relative weight filtration and Kashiwara splitting
def test_relative_checks():
    orbit = gen_sl2_tensor([2, 3])
    for r in relative_checks(orbit, (1,), (2,)) + relative_checks(orbit, (2,), (1,)):
        assert r.passed, (r.name, r.details)


# Test 10: the two double gradings of a pair agree
def test_zassenhaus_symmetry():
    orbit = gen_sl2_tensor([2, 2])
    for b in (-1, 1):
        for c in (-1, 1):
            ok, (d1, d2) = zassenhaus_check(orbit, (1,), (2,), b, c)
            assert ok and d1 == d2 == 1


# Test 11: W of the sum of a tensor pair is the Clebsch-Gordan weight
def test_sum_of_tensor_pair():
    orbit = gen_sl2_tensor([2, 2])
    assert orbit.w_multi((1, 2)).graded_dims() == {-2: 1, 0: 2, 2: 1}
    assert orbit.w_multi((1,)).graded_dims() == {-1: 2, 1: 2}


# Test 12: iterated graded pieces of a tensor pair follow the tensor-basis weights
def test_iterated_graded_tensor_pair():
    orbit = gen_sl2_tensor([2, 2])
    ws = [orbit.w_multi((1,)), orbit.w_multi((2,))]
    assert iterated_graded(ws, [1, 1]).dim == 1
    assert iterated_graded(ws, [1, -1]).dim == 1
    assert iterated_graded(ws, [0, 0]).dim == 0
    assert iterated_graded(ws[:1], [1]).dim == 2


# Test 13: the key lemma on three size-3 factors, dimension 27
def test_key_lemma_dim_27():
    orbit = gen_sl2_tensor([3, 3, 3])
    assert orbit.dim == 27
    for r in key_lemma_check(orbit, orbit.indices):
        assert r.passed, (r.name, r.details)


# Test 14: W(N_2) is not the weight filtration of N_2 relative to W(N_1)
def test_relative_rejects_wrong_filtration():
    orbit = gen_sl2_tensor([2, 2])
    N2, W1 = orbit.nilpotent(2), orbit.w_multi((1,))
    ok, witnesses = verify_relative(N2, W1, orbit.w_multi((2,)))
    assert not ok
    assert witnesses[-1]['dim_src'] != witnesses[-1]['dim_dst']
    assert verify_relative(N2, W1, orbit.w_multi((1, 2)))[0]


# Test 15: moving a single step of W(J3) breaks the axioms
@pytest.mark.parametrize('steps', [
    {-2: [[0, 1, 0]], 0: [[1, 0, 0], [0, 1, 0]]},
    {-2: [[1, 0, 0]], 0: [[1, 0, 0], [0, 0, 1]]},
    {-2: [[1, 0, 0]], 0: [[1, 0, 0], [0, 1, 1]]},
])
def test_weight_filtration_is_unique(steps):
    N = gen_jordan([3]).nilpotent(1)
    W = weight_filtration(N)
    assert W.level(-2) == canonicalize([[1, 0, 0]], 3)
    assert W.level(0) == canonicalize([[1, 0, 0], [0, 1, 0]], 3)
    moved = IncFiltration(3, {k: canonicalize(v, 3) for k, v in steps.items()} | {2: full_space(3)})
    assert not verify_weight_axioms(N, moved)[0]
