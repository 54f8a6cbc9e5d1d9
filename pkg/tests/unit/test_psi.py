import os
import sys

import pytest

# Get path to root directory (two levels up from tests/)
path_to_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path += [path_to_root]

import weightlab.psi as psi_module
from weightlab.complexes import CohomologyProfile
from weightlab.errors import InputError, ResourceError
from weightlab.orbit import gen_jordan, gen_sl2_tensor, zero_orbit
from weightlab.psi import (build_psi, columns_for, truncation_step, psi_exact_profile, psi_nu_oracle, nu,
                           nu_power_on_H, psi_build_check, monodromy_weight_check, window, window_check,
                           psi_decomposition_check, ker_coker_bridge_check, a_complex, a_complex_check,
                           ker_nu_power_check, primitive_part, primitive_expected_dim, gamma_check)
from weightlab.util.misc import all_passed


# Test 1: column ranges and the truncation step
def test_columns_and_step():
    assert columns_for('cokernel', 2) == [-2, -1, 0]
    assert columns_for('kernel', 2) == [1, 2, 3]
    with pytest.raises(InputError):
        columns_for('bogus', 2)
    assert truncation_step(gen_jordan([3])) == 4
    assert truncation_step(zero_orbit(1, 2)) == 2


# Test 2: accepted cohomology of zero orbits in both modes
@pytest.mark.parametrize('n,mode,expected', [
    (1, 'cokernel', {0: 1}),
    (1, 'kernel', {1: 1}),
    (2, 'cokernel', {0: 1, 1: 1}),
    (2, 'kernel', {1: 1, 2: 1}),
])
def test_psi_zero_orbit(n, mode, expected):
    orbit = zero_orbit(1, n)
    psi = build_psi(orbit, (1,) * n, mode=mode)
    assert psi.accepted.dims == expected
    assert psi_exact_profile(orbit, (1,) * n, mode).dims == expected
    assert all_passed(psi_build_check(psi))


# Test 3: a single Jordan block of size 2: H^0 is L and nu induces N
@pytest.mark.parametrize('mode', ['cokernel', 'kernel'])
def test_psi_single_block(mode):
    orbit = gen_jordan([2])
    psi = build_psi(orbit, (1,), mode=mode)
    degree = 0 if mode == 'cokernel' else 1
    assert psi.accepted.dims == {degree: 2}
    assert nu_power_on_H(psi, 1).dims == {degree: 1}
    assert nu_power_on_H(psi, 2).is_acyclic()
    assert psi_nu_oracle(orbit, (1,), mode).dims == {degree: 1}
    assert nu(psi).is_nilpotent()
    for record in psi_build_check(psi):
        assert record.passed, (record.name, record.details)


# Test 4: explicit truncations and input errors
def test_build_psi_inputs():
    orbit = gen_jordan([2])
    psi = build_psi(orbit, (1,), p_max=4)
    assert psi.p_max == 4 and psi.columns == [-4, -3, -2, -1, 0]
    assert psi.accepted.dims == {0: 2}
    with pytest.raises(InputError):
        build_psi(orbit, (1,), p_max=psi.i0 - 1)
    with pytest.raises(InputError):
        build_psi(orbit, (1,), mode='bogus')
    with pytest.raises(InputError):
        build_psi(orbit, (0,))


# Test 5: nu lowers W by two and F by one and nu^r is a graded quasi-isomorphism
@pytest.mark.parametrize('mode', ['cokernel', 'kernel'])
def test_monodromy_weight(mode):
    psi = build_psi(gen_jordan([2]), (1,), mode=mode)
    records = monodromy_weight_check(psi)
    names = {r.name for r in records}
    assert {'psi.nu_chain_map', 'psi.nu_weight_drop', 'psi.nu_hodge_drop', 'psi.monodromy_bijection',
            'psi.graded_symmetry'} <= names
    for record in records:
        assert record.passed, (record.name, record.parameters, record.details)


# Test 6: the graded pieces of Psi live in the window and decompose over K
@pytest.mark.parametrize('mode', ['cokernel', 'kernel'])
def test_window_and_decomposition(mode):
    psi = build_psi(gen_jordan([2]), (1,), mode=mode)
    for r in range(-psi.i0, psi.i0 + 1):
        record = window_check(psi, r)
        assert record.passed, record.details
        assert psi_decomposition_check(psi, r).passed
    if mode == 'kernel':
        assert window(psi, 0) == [1]
    else:
        assert window(psi, 0) == [0]


# Test 7: ker nu and coker nu recover the graded pieces of Omega*L
@pytest.mark.parametrize('mode', ['cokernel', 'kernel'])
def test_ker_coker_bridge(mode):
    psi = build_psi(gen_jordan([2]), (1,), mode=mode)
    for r in range(-psi.i0, psi.i0 + 1):
        record = ker_coker_bridge_check(psi, r)
        assert record.passed, record.details


# Test 8: the A-complexes and the kernels of nu powers are acyclic
def test_a_complexes():
    assert a_complex_check(gen_jordan([2]), (1,), 1).passed
    assert a_complex_check(gen_jordan([3]), (1,), 2).passed
    assert a_complex_check(gen_sl2_tensor([2, 2]), (1, 2), 3).passed
    for i in (1, 2, 3):
        assert ker_nu_power_check(gen_jordan([3]), i).passed
    with pytest.raises(InputError):
        a_complex(gen_jordan([2]), (1,), 0)
    with pytest.raises(InputError):
        a_complex(gen_sl2_tensor([2, 2]), (1,), 2, M=(1,))


# Test 9: primitive parts and the gamma map
def test_primitive_parts():
    j3 = gen_jordan([3])
    assert primitive_part(j3, (1,), (4,)).dim == 1
    assert primitive_expected_dim(j3, (1,), (4,)) == 1
    assert gamma_check(j3, (1,), (4,)).passed
    assert primitive_part(j3, (1,), (2,)).dim == 0
    pair = gen_sl2_tensor([2, 2])
    assert primitive_part(pair, (1, 2), (3, 3)).dim == 1
    assert gamma_check(pair, (1, 2), (3, 3)).passed
    assert gamma_check(gen_sl2_tensor([3, 2]), (1, 2), (4, 3)).passed
    with pytest.raises(InputError):
        primitive_part(pair, (1, 2), (1, 3))
    with pytest.raises(InputError):
        primitive_part(pair, (1, 2), (3,))


# Test 10: unequal multiplicities on a tensor pair
@pytest.mark.integration
def test_psi_tensor_pair_with_multiplicities():
    orbit = gen_sl2_tensor([2, 3])
    psi = build_psi(orbit, (1, 2), mode='cokernel')
    for record in psi_build_check(psi):
        assert record.passed, (record.name, record.details)
    for record in monodromy_weight_check(psi):
        assert record.passed, (record.name, record.parameters, record.details)


# Test 11: a truncation that never settles reports the last two different profiles
def test_build_psi_reports_both_profiles(monkeypatch):
    monkeypatch.setattr(psi_module, '_psi_at', lambda orbit, mults, mode, q: q)
    monkeypatch.setattr(psi_module, '_accepted', lambda small, big, mode: (None, CohomologyProfile({0: small})))
    with pytest.raises(ResourceError, match=r'up to q = 4: last profiles \{0: 4\} and \{0: 5\}'):
        build_psi(gen_jordan([2]), (1,))
