"""
The index category S(M): strictly decreasing chains of nonempty subsets
starting at M, the exterior index set M+ of subsets J, and the signs that
turn them into a double complex.

A chain is a tuple of sorted tuples, e.g. ((1, 2), (1,)). Positions are
1-based; deleting position 1 (the set M itself) leaves the category.
"""
from collections import namedtuple
from functools import lru_cache
from math import comb

from .constants import MAX_CHAIN_SET
from .errors import InputError, ResourceError
from .util.misc import subsets

BiIndex = namedtuple('BiIndex', ['J', 'chain'])


def as_set(M):
    return tuple(sorted(set(M)))


def _guard(M):
    if len(M) > MAX_CHAIN_SET:
        raise ResourceError(f'|M| = {len(M)} exceeds the chain enumeration guard {MAX_CHAIN_SET}')


@lru_cache(maxsize=None)
def _chains(M):
    if not M:
        return ((),)
    out = [(M,)]
    for T in subsets(M):
        if len(T) == len(M):
            continue
        out.extend((M,) + c for c in _chains(T))
    return tuple(sorted(out, key=lambda c: (len(c), c)))


def enumerate_chains(M):
    """All chains M = s_1 > s_2 > ... > s_p != {}; S(empty) is the single empty chain."""
    M = as_set(M)
    _guard(M)
    return list(_chains(M))


def count_chains(n):
    """Closed recursion c(n) = 1 + sum_{k<n} C(n, k) c(k): 1, 3, 13, 75, 541, ..."""
    if n == 0:
        return 1
    return 1 + sum(comb(n, k) * count_chains(k) for k in range(1, n))


def deletions(chain):
    """[(chain without position i, (-1)^i)] for positions i >= 2."""
    return [(chain[:i - 1] + chain[i:], (-1) ** i) for i in range(2, len(chain) + 1)]


def chains_through(M, K):
    """S_K(M): chains of S(M) containing K."""
    M, K = as_set(M), as_set(K)
    if not K:
        raise InputError('K must be nonempty')
    if not set(K) <= set(M):
        raise InputError(f'K = {K} is not a subset of M = {M}')
    return [s for s in enumerate_chains(M) if K in s]


def product_iso(K, M):
    """The bijection S(K) x S(M - K) -> S_K(M), (s., s'.) -> (K u s'_1, ..., K u s'_p', s_1, ...)."""
    M, K = as_set(M), as_set(K)
    through = chains_through(M, K)
    rest = tuple(i for i in M if i not in K)
    iso = {}
    for s in enumerate_chains(K):
        for sp in enumerate_chains(rest):
            image = tuple(as_set(K + t) for t in sp) + s
            iso[(s, sp)] = image
    images = set(iso.values())
    assert len(images) == len(iso), 'product map is not injective'
    assert images == set(through), 'product map does not land onto S_K(M)'
    for (s, sp), image in iso.items():
        assert len(image) == len(s) + len(sp), 'product map does not preserve length'
    return iso


def enumerate_biindices(M):
    """All (J, s.) with J a subset of M (possibly empty) and s. in S(M)."""
    M = as_set(M)
    chains = enumerate_chains(M)
    return [BiIndex(J, s) for J in subsets(M, nonempty=False) for s in chains]


def degree(bi, M):
    """|J| + |M| - |s.|: maximal chains sit at chain degree 0."""
    return len(bi.J) + len(as_set(M)) - len(bi.chain)


def koszul_sign(i, J):
    return (-1) ** sum(1 for j in J if j < i)


def removal_sign(chain):
    """Sign of the permutation listing the top set in removal order, the last survivor last.

    Only defined for maximal chains.
    """
    order = []
    for a, b in zip(chain, chain[1:] + ((),)):
        gone = [x for x in a if x not in b]
        assert len(gone) == 1, f'{chain} is not a maximal chain'
        order.extend(gone)
    inversions = sum(1 for p in range(len(order)) for q in range(p + 1, len(order)) if order[p] > order[q])
    return (-1) ** inversions


def is_maximal(chain):
    return len(chain) == len(chain[0]) if chain else True


def simplicial_square_is_zero(M):
    """The deletion differential alone squares to zero on the constant functor."""
    for s in enumerate_chains(M):
        total = {}
        for t, e in deletions(s):
            for u, f in deletions(t):
                total[u] = total.get(u, 0) + e * f
        if any(total.values()):
            return False
    return True
