import os
import sys

import pytest

# Get path to root directory (two levels up from tests/)
path_to_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path += [path_to_root]

from weightlab.errors import InputError, ResourceError
from weightlab.scat import (enumerate_chains, count_chains, deletions, chains_through, product_iso,
                            enumerate_biindices, degree, koszul_sign, removal_sign, is_maximal,
                            simplicial_square_is_zero, BiIndex)


# Test 1: chain counts follow the ordered Bell recursion
@pytest.mark.parametrize('n,expected', [(1, 1), (2, 3), (3, 13), (4, 75), (5, 541)])
def test_chain_counts(n, expected):
    M = tuple(range(1, n + 1))
    assert count_chains(n) == expected
    if n <= 4:
        assert len(enumerate_chains(M)) == expected


# Test 2: chains of {1,2} and the empty category
def test_small_chains():
    assert enumerate_chains((1, 2)) == [((1, 2),), ((1, 2), (1,)), ((1, 2), (2,))]
    assert enumerate_chains(()) == [()]
    with pytest.raises(ResourceError):
        enumerate_chains(tuple(range(1, 8)))


# Test 3: deletions only touch positions >= 2 and alternate in sign
def test_deletions():
    chain = ((1, 2, 3), (1, 2), (1,))
    assert deletions(chain) == [(((1, 2, 3), (1,)), 1), (((1, 2, 3), (1, 2)), -1)]
    assert deletions(((1,),)) == []
    for n in (2, 3, 4):
        assert simplicial_square_is_zero(tuple(range(1, n + 1)))


# Test 4: S_K(M) is isomorphic to S(K) x S(M - K)
@pytest.mark.parametrize('K', [(1,), (2,), (1, 2), (1, 3), (1, 2, 3)])
def test_product_iso(K):
    M = (1, 2, 3)
    iso = product_iso(K, M)
    assert len(iso) == len(chains_through(M, K))
    with pytest.raises(InputError):
        chains_through(M, (4,))


# Test 5: degrees put maximal chains with J empty at zero
def test_biindex_degrees():
    M = (1, 2)
    bis = enumerate_biindices(M)
    assert len(bis) == 4 * 3
    assert degree(BiIndex((), ((1, 2), (1,))), M) == 0
    assert degree(BiIndex((1, 2), ((1, 2),)), M) == 3
    assert max(degree(b, M) for b in bis) == 3


# Test 6: signs
def test_signs():
    assert koszul_sign(2, (1,)) == -1
    assert koszul_sign(1, (2, 3)) == 1
    assert removal_sign(((1, 2), (1,))) == -1
    assert removal_sign(((1, 2), (2,))) == 1
    assert is_maximal(((1, 2), (2,))) and not is_maximal(((1, 2),))
    with pytest.raises(AssertionError):
        removal_sign(((1, 2, 3), (1,)))
