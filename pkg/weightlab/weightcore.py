"""
Weight filtrations of nilpotent endomorphisms and the checks built on them:
the centered weight axioms, relative weight filtrations, the Kashiwara
splitting and the multi-variable decomposition of the key lemma.
"""
from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np
from sympy import Matrix, Rational

from .constants import EXHAUSTIVE_PERMUTATIONS, RANDOM_PERMUTATIONS, DEFAULT_SEED
from .errors import InputError, ContractError
from .qlinalg import (LinMap, IncFiltration, Subquotient, kernel, span, intersect, zero_space,
                      full_space, graded, iterated_graded, induced_block, matrix_rank)
from .util.misc import CheckRecord, subsets


def nilpotency_index(N):
    """Least k with N^k = 0."""
    n = N.domain_dim
    if N.codomain_dim != n:
        raise InputError(f'endomorphism expected, got shape {N.matrix.shape}')
    P = LinMap.identity(n)
    for k in range(n + 1):
        if P.is_zero():
            return k
        P = N.compose(P)
    raise ContractError(f'map is not nilpotent: N^{n} != 0')


def weight_filtration(N, check=True):
    """W(N) centered at 0, by W_k = sum_{j>=0} N^j(ker N^{k+2j+1})."""
    nu = nilpotency_index(N)
    n = N.domain_dim
    if n == 0:
        return IncFiltration(0, {})
    powers = [LinMap.identity(n)]
    for _ in range(nu):
        powers.append(N.compose(powers[-1]))
    kernels = {}

    def ker_power(e):
        if e <= 0:
            return zero_space(n)
        if e >= nu:
            return full_space(n)
        if e not in kernels:
            kernels[e] = kernel(powers[e])
        return kernels[e]

    steps = {}
    for k in range(-nu, nu):
        parts = [powers[j].push(ker_power(k + 2 * j + 1)) for j in range(max(0, -k), nu)]
        steps[k] = span(*parts) if parts else zero_space(n)
    W = IncFiltration(n, steps)
    if check:
        ok, witnesses = verify_weight_axioms(N, W)
        if not ok:
            raise ContractError(f'weight filtration failed its own axioms: {witnesses[-1]}')
    return W


def verify_weight_axioms(N, W):
    """N W_j in W_{j-2} for all j and N^j: Gr_j -> Gr_{-j} bijective for j > 0.

    Returns (passed, witnesses); on failure the last witness is the first
    failing (j, dims).
    """
    if W.ambient_dim != N.domain_dim:
        raise InputError('filtration and map live on different spaces')
    R = W.radius() + 2
    witnesses = []
    for j in range(-R, R + 1):
        if not W.level(j - 2).contains(N.push(W.level(j))):
            witnesses.append({'j': j, 'test': 'inclusion', 'dim_W_j': W.level(j).rank,
                              'dim_W_j-2': W.level(j - 2).rank})
            return False, witnesses
    Nj = LinMap.identity(N.domain_dim)
    for j in range(1, R + 1):
        Nj = N.compose(Nj)
        src, dst = graded(W, j), graded(W, -j)
        if src.dim == 0 and dst.dim == 0:
            continue
        rank = matrix_rank(induced_block(Nj.matrix, src, dst)) if src.dim and dst.dim else 0
        witness = {'j': j, 'test': 'bijection', 'dim_gr_j': src.dim, 'dim_gr_-j': dst.dim, 'rank': rank}
        witnesses.append(witness)
        if not (src.dim == dst.dim == rank):
            return False, witnesses
    return True, witnesses


@dataclass
class WeightReport:
    filtration: IncFiltration
    graded_dims: dict = field(default_factory=dict)
    axiom_witnesses: list = field(default_factory=list)

    def is_symmetric(self):
        return all(self.graded_dims.get(-k, 0) == d for k, d in self.graded_dims.items())


def weight_report(N):
    W = weight_filtration(N, check=False)
    _, witnesses = verify_weight_axioms(N, W)
    return WeightReport(W, W.graded_dims(), witnesses)


def jordan_block_sizes(N):
    """Block sizes of a nilpotent map from sympy's Jordan form, largest first."""
    n = N.domain_dim
    if n == 0:
        return []
    rows = [[Rational(int(x.numerator), int(x.denominator)) for x in row] for row in N.rows()]
    J = Matrix(rows).jordan_form(calc_transform=False)
    sizes, size = [], 1
    for i in range(n - 1):
        if J[i, i + 1] == 1:
            size += 1
        else:
            sizes.append(size)
            size = 1
    sizes.append(size)
    return sorted(sizes, reverse=True)


def jordan_weight_dims(sizes):
    """A block of size s contributes weights s-1, s-3, ..., -(s-1)."""
    dims = {}
    for s in sizes:
        for t in range(s):
            w = s - 1 - 2 * t
            dims[w] = dims.get(w, 0) + 1
    return dict(sorted(dims.items()))


def verify_relative(N, W, M):
    """M is the weight filtration of N relative to W.

    Returns (passed, witnesses). Raises ContractError if N does not
    preserve W.
    """
    for k in W.jumps():
        if not W.level(k).contains(N.push(W.level(k))):
            raise ContractError(f'N does not preserve W_{k}')
    R = M.radius() + W.radius() + 2
    witnesses = []
    for j in range(-R, R + 1):
        if not M.level(j - 2).contains(N.push(M.level(j))):
            witnesses.append({'j': j, 'test': 'inclusion'})
            return False, witnesses
    for k in W.jumps():
        Nj = LinMap.identity(N.domain_dim)
        for j in range(0, R + 1):
            if j:
                Nj = N.compose(Nj)
            src = iterated_graded([W, M], [k, k + j])
            dst = iterated_graded([W, M], [k, k - j])
            if src.dim == 0 and dst.dim == 0:
                continue
            rank = matrix_rank(induced_block(Nj.matrix, src, dst)) if src.dim and dst.dim else 0
            witnesses.append({'k': k, 'j': j, 'dim_src': src.dim, 'dim_dst': dst.dim, 'rank': rank})
            if not (src.dim == dst.dim == rank):
                return False, witnesses
    return True, witnesses


def kashiwara_split_check(N, W, M):
    """dim Gr^M_l L = sum_k dim Gr^M_l Gr^W_k L for every l."""
    details = {}
    passed = True
    for l in range(-M.radius() - W.radius() - 1, M.radius() + W.radius() + 2):
        whole = graded(M, l).dim
        pieces = sum(iterated_graded([W, M], [k, l]).dim for k in W.jumps())
        if whole or pieces:
            details[l] = (whole, pieces)
        passed = passed and whole == pieces
    return passed, details


def _box(filtrations):
    return [w.jumps() or [0] for w in filtrations]


def key_lemma_check(orbit, A, seed=DEFAULT_SEED):
    """Decomposition of the relative weight filtrations W^A over the W^i, i in A."""
    A = tuple(sorted(A))
    if not A:
        raise InputError('key lemma needs a nonempty subset')
    for i in A:
        if i not in orbit.indices:
            raise InputError(f'index {i} is not in the orbit')
    rng = np.random.default_rng(seed)
    WA = orbit.w_multi(A)
    singles = [orbit.w_multi((i,)) for i in A]
    records = []

    # (i) Gr^{W^A}_l Gr^{W^i}_k Gr^{W^{A-i}}_{k'} vanishes off l = k + k'
    bad = []
    for i in A:
        rest = tuple(j for j in A if j != i)
        W_rest, W_i = orbit.w_or_trivial(rest), orbit.w_multi((i,))
        for kp, k, l in product(W_rest.jumps(), W_i.jumps(), WA.jumps()):
            if l == k + kp:
                continue
            d = iterated_graded([W_rest, W_i, WA], [kp, k, l]).dim
            if d:
                bad.append({'i': i, "k'": kp, 'k': k, 'l': l, 'dim': d})
    records.append(CheckRecord('keylemma.vanishing', {'A': A}, not bad, {'violations': bad}))

    # (ii) dim Gr^{W^A}_r = sum over m with |m| = r of iterated one-variable graded pieces
    box = list(product(*_box(singles)))
    iterated = {m: iterated_graded(singles, list(m)).dim for m in box}
    dims, ok = {}, True
    for r in WA.jumps():
        total = sum(d for m, d in iterated.items() if sum(m) == r)
        dims[r] = (graded(WA, r).dim, total)
        ok = ok and dims[r][0] == total
    off_support = sum(d for m, d in iterated.items() if sum(m) not in WA.steps)
    ok = ok and off_support == 0
    records.append(CheckRecord('keylemma.sum', {'A': A}, ok, {'dims': dims}))

    # refined form with upper bounds a_s on each variable
    bad = []
    for a in box:
        start = Subquotient(intersect(*[w.level(ai) for w, ai in zip(singles, a)]), zero_space(orbit.dim))
        for r in WA.jumps():
            lhs = iterated_graded([WA], [r], start=start).dim
            rhs = sum(d for m, d in iterated.items()
                      if sum(m) == r and all(mi <= ai for mi, ai in zip(m, a)))
            if lhs != rhs:
                bad.append({'a': a, 'r': r, 'lhs': lhs, 'rhs': rhs})
    records.append(CheckRecord('keylemma.bounded_sum', {'A': A}, not bad, {'violations': bad}))

    # (iii) for A = B u C the four double gradings agree
    bad = []
    for B in subsets(A):
        C = tuple(i for i in A if i not in B)
        if not C or B > C:
            continue
        WB, WC = orbit.w_multi(B), orbit.w_multi(C)
        for b, c in product(WB.jumps(), WC.jumps()):
            four = (iterated_graded([WC, WA], [c, b + c]).dim,
                    iterated_graded([WC, WB], [c, b]).dim,
                    iterated_graded([WB, WA], [b, b + c]).dim,
                    iterated_graded([WB, WC], [b, c]).dim)
            if len(set(four)) != 1:
                bad.append({'B': B, 'C': C, 'b': b, 'c': c, 'dims': four})
    records.append(CheckRecord('keylemma.partition', {'A': A}, not bad, {'violations': bad}))

    # (iv) order independence
    n = len(A)
    if n <= EXHAUSTIVE_PERMUTATIONS:
        orders = list(permutations(range(n)))
    else:
        orders = [tuple(rng.permutation(n)) for _ in range(RANDOM_PERMUTATIONS)]
    bad = []
    for order in orders:
        ws = [singles[t] for t in order]
        for m in box:
            d = iterated_graded(ws, [m[t] for t in order]).dim
            if d != iterated[m]:
                bad.append({'order': [A[t] for t in order], 'm': m, 'dim': d, 'expected': iterated[m]})
    records.append(CheckRecord('keylemma.order', {'A': A}, not bad,
                               {'orders': len(orders), 'violations': bad}))
    return records


def zassenhaus_check(orbit, B, C, b, c):
    """dim Gr^{W^B}_b Gr^{W^C}_c L = dim Gr^{W^C}_c Gr^{W^B}_b L."""
    WB, WC = orbit.w_multi(B), orbit.w_multi(C)
    d1 = iterated_graded([WC, WB], [c, b]).dim
    d2 = iterated_graded([WB, WC], [b, c]).dim
    return d1 == d2, (d1, d2)


def lambda_independence_check(orbit, J, seed=DEFAULT_SEED, trials=5):
    """W(sum lambda_j N_j) does not depend on the positive weights lambda."""
    J = tuple(sorted(J))
    rng = np.random.default_rng(seed)
    expected = orbit.w_multi(J)
    lambdas = []
    passed = True
    for _ in range(trials):
        lam = [int(x) for x in rng.integers(1, 6, size=len(J))]
        N = LinMap.zero(orbit.dim, orbit.dim)
        for l, j in zip(lam, J):
            N = N + orbit.nilpotent(j).scale(l)
        same = weight_filtration(N) == expected
        lambdas.append({'lambda': lam, 'same': same})
        passed = passed and same
    return CheckRecord('weight.lambda_independence', {'J': J}, passed, {'trials': lambdas})


def relative_checks(orbit, I, J):
    """N_J on (L, W^I) with M = W^{I u J}: relativity and the Kashiwara splitting."""
    I, J = tuple(sorted(I)), tuple(sorted(J))
    NJ = orbit.n_sum(J)
    WI = orbit.w_multi(I)
    M = orbit.w_multi(tuple(sorted(set(I) | set(J))))
    ok, witnesses = verify_relative(NJ, WI, M)
    split_ok, split = kashiwara_split_check(NJ, WI, M)
    return [
        CheckRecord('weight.relative', {'I': I, 'J': J}, ok, {'witnesses': witnesses[-3:]}),
        CheckRecord('weight.kashiwara', {'I': I, 'J': J}, split_ok, {'dims': split}),
    ]
