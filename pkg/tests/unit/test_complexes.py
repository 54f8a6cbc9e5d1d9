import os
import sys

import pytest

# Get path to root directory (two levels up from tests/)
path_to_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path += [path_to_root]

from weightlab.errors import ContractError, InputError
from weightlab.orbit import NilpotentOrbit, gen_jordan, gen_sl2_tensor, gen_conjugated, zero_orbit
from weightlab.qlinalg import LinMap, whole, joint_graded
from weightlab.complexes import (CohomologyProfile, assemble, assemble_map, koszul, omega_koszul_check,
                                 graded_weight, c_complex, elementary, elementary_check, t_sets,
                                 t_embedding_check, purity_check, decomposition_check, subcomplex_check,
                                 exhaustion_check, euler_check, kk_check, w_minus1_fiber_check, hodge_table,
                                 hodge_check, mhc_shift, mhc_shift_check, elementary_decomposition_check,
                                 basic_lemma_check, support_radius, r_window, omega_hodge,
                                 omega_hodge_filtered)
from weightlab.util.misc import all_passed


def _line_complex(coeffs):
    """Q in degrees 0..len(coeffs) with d^k = coeffs[k]."""
    eye = LinMap.identity(1).matrix
    terms = [(k, k, whole(1)) for k in range(len(coeffs) + 1)]
    edges = [(k, k + 1, c, eye) for k, c in enumerate(coeffs)]
    return terms, edges


# Test 1: profile arithmetic
def test_cohomology_profile():
    p = CohomologyProfile({0: 1, 1: 0})
    assert p.dims == {0: 1}
    assert p.concentrated() == (0, 1)
    assert CohomologyProfile().concentrated() == (None, 0)
    q = p + CohomologyProfile({2: 3})
    assert q.concentrated() is None
    assert q.euler() == 4 and q.total() == 4
    assert q.shifted(-1).dims == {-1: 1, 1: 3}


# Test 2: assembly rejects d^2 != 0, degree-skipping edges and non chain maps
def test_assembly_contracts():
    terms, edges = _line_complex([1, 1])
    with pytest.raises(ContractError):
        assemble(terms, edges)
    terms, edges = _line_complex([1, 0])
    assert assemble(terms, edges).profile().dims == {2: 1}
    with pytest.raises(ContractError):
        assemble(terms, [(0, 2, 1, LinMap.identity(1).matrix)])

    src = assemble([('a', 0, whole(1))], [])
    dst = assemble(*_line_complex([1]))
    with pytest.raises(ContractError):
        assemble_map(src, dst, [('a', 0, 1, LinMap.identity(1).matrix)])


# Test 3: Koszul complexes of small orbits
@pytest.mark.parametrize('orbit,expected', [
    (zero_orbit(1, 1), {0: 1, 1: 1}),
    (gen_jordan([2]), {0: 1, 1: 1}),
    (gen_sl2_tensor([2, 2]), {0: 1, 1: 2, 2: 1}),
])
def test_koszul_profiles(orbit, expected):
    assert koszul(orbit).profile().dims == expected
    assert omega_koszul_check(orbit).passed


# Test 4: graded pieces of a single Jordan block of size 3
def test_graded_single_block():
    orbit = gen_jordan([3])
    assert graded_weight(orbit, 3).profile().dims == {1: 1}
    assert graded_weight(orbit, 1).profile().is_acyclic()
    assert graded_weight(orbit, 0).profile().is_acyclic()
    assert graded_weight(orbit, -3).profile().dims == {0: 1}


# Test 5: C^K_r of a tensor pair is concentrated where purity predicts
def test_c_complex_tensor_pair():
    orbit = gen_sl2_tensor([2, 2])
    assert c_complex(orbit, (1, 2), (1, 2), 4).profile().dims == {2: 1}
    assert c_complex(orbit, (1, 2), (1, 2), -4).profile().dims == {1: 1}
    for r in range(-5, 6):
        record = purity_check(orbit, (1, 2), r)
        assert record.passed, record.details
    with pytest.raises(InputError):
        c_complex(orbit, (), (1, 2), 1)
    with pytest.raises(InputError):
        c_complex(orbit, (1, 3), (1, 2, 3), 1)


# Test 6: elementary complexes and their predicted cohomology
def test_elementary_complexes():
    orbit = gen_sl2_tensor([2, 2])
    assert elementary(orbit, (3, 3)).profile().concentrated() == (2, 1)
    assert elementary(orbit, (2, 4)).profile().concentrated() == (None, 0)
    for m in [(3, 3), (2, 4), (1, 2), (-1, 3), (0, 0), (-1, -1)]:
        assert elementary_check(orbit, m).passed
    # joint and iterated realizations of the terms agree
    for m in [(3, 3), (1, 1), (-1, -1)]:
        assert elementary(orbit, m, realization=joint_graded).profile() == elementary(orbit, m).profile()


# Test 7: T(r) and T'(r)
def test_t_sets():
    kind, ms = t_sets((1, 2), 4)
    assert kind == 'T'
    assert [tuple(m.values()) for m in ms] == [(2, 4), (3, 3), (4, 2)]
    kind, ms = t_sets((1,), -3)
    assert kind == "T'" and ms == [{1: -2}]
    with pytest.raises(InputError):
        t_sets((1, 2), 0)


# Test 8: the T-complexes embed quasi-isomorphically into C^K_r
@pytest.mark.parametrize('r', [-4, -3, -2, 2, 3, 4])
def test_t_embedding(r):
    orbit = gen_sl2_tensor([2, 2])
    record = t_embedding_check(orbit, (1, 2), r)
    assert record.passed, record.details


# Test 9: Omega* checks on small orbits
@pytest.mark.parametrize('orbit', [gen_jordan([2]), gen_jordan([3]), gen_sl2_tensor([2, 2])])
def test_omega_checks(orbit):
    assert all_passed(subcomplex_check(orbit))
    assert exhaustion_check(orbit).passed
    assert euler_check(orbit).passed
    assert all_passed(kk_check(orbit))


# Test 10: the graded pieces decompose over K
def test_graded_decomposition():
    orbit = gen_sl2_tensor([2, 3])
    assert support_radius(orbit) == 3 + 2
    for r in r_window(orbit, margin=1):
        record = decomposition_check(orbit, r)
        assert record.passed, record.details


# Test 11: C^{KM}_r for K inside M matches W_{-1} of the residual orbit
@pytest.mark.parametrize('K', [(1,), (2,)])
def test_w_minus1_fiber(K):
    orbit = gen_sl2_tensor([2, 2])
    for r in (-3, -2, -1, 1, 2, 3):
        record = w_minus1_fiber_check(orbit, K, r)
        assert record.passed, record.details
    with pytest.raises(InputError):
        w_minus1_fiber_check(orbit, (1, 2), 1)
    with pytest.raises(InputError):
        w_minus1_fiber_check(orbit, K, 0)


# Test 12: combinatorial elementary complexes sum to C^K_r and vanish where expected
@pytest.mark.parametrize('r', [-3, -1, 0, 1, 3])
def test_elementary_decomposition(r):
    orbit = gen_sl2_tensor([2, 2])
    assert elementary_decomposition_check(orbit, (1, 2), r).passed
    assert basic_lemma_check(orbit, (1, 2), r).passed


# Test 13: Hodge numbers sum to the cohomology and do not depend on the basis
def test_hodge_tables():
    orbit = gen_sl2_tensor([2, 2])
    conj = gen_conjugated(orbit, seed=3)
    for k in r_window(orbit, margin=0):
        assert hodge_check(orbit, k).passed
        assert hodge_table(orbit, k) == hodge_table(conj, k)
    assert hodge_table(gen_jordan([2]), 0) == {}
    with pytest.raises(InputError):
        hodge_table(NilpotentOrbit(1, (LinMap.zero(1, 1),)), 0)


# Test 14: the shifted complex, assembled directly, has the reindexed Hodge numbers
def test_mhc_shift():
    table = {(0, 1, 0): 2}
    assert mhc_shift(table, 1, 1) == {(-1, 0, -1): 2}
    orbit = gen_jordan([2])
    for k, m, h in [(2, 2, 1), (-2, 1, 1), (2, 3, 0), (-2, -1, 2)]:
        record = mhc_shift_check(orbit, k, m, h)
        assert record.passed, record.details
        assert record.details['direct']
    assert mhc_shift_check(gen_sl2_tensor([2, 2]), 0, 1, 1).passed
    with pytest.raises(InputError):
        mhc_shift_check(NilpotentOrbit(1, (LinMap.zero(1, 1),)), 0, 1, 1)


# Test 15: three commuting factors
@pytest.mark.integration
def test_three_factor_purity_and_decomposition():
    orbit = gen_sl2_tensor([2, 2, 2])
    for r in (-5, -3, 0, 3, 5):
        assert purity_check(orbit, (1, 2, 3), r).passed
        assert decomposition_check(orbit, r).passed
    assert t_embedding_check(orbit, (1, 2, 3), 4).passed


# Test 16: F^p Omega*L on a tensor pair, F^{p-|J|}L at each term, is closed under d
@pytest.mark.parametrize('p,dims', [
    (0, {0: 8, 1: 20, 2: 16, 3: 4}),
    (1, {0: 6, 1: 19, 2: 16, 3: 4}),
    (2, {0: 2, 1: 13, 2: 14, 3: 4}),
    (3, {1: 4, 2: 8, 3: 3}),
])
def test_omega_hodge(p, dims):
    orbit = gen_sl2_tensor([2, 2])
    assert omega_hodge(orbit, p).chain_dims() == dims
    assert omega_hodge_filtered(orbit).subcomplex_violations(p) == []
