"""
The unipotent nearby-cycles complex of f = prod z_i^{n_i} over a nilpotent orbit.

Psi is the Koszul complex of N_i - n_i u on L[u] tensored with the S(M)
direction, truncated to finitely many u-columns. Column c carries a copy of
Omega*L, eta: (J, s., c) -> (J+i, s., c+1) is -n_i times the Koszul sign and
nu moves column c-1 identically onto column c.

    cokernel  columns -p_max..0, eta leaving column 0 dropped; truncations are subcomplexes
    kernel    columns 1..p_max+1, eta leaving the top column dropped; truncations are quotients

In both modes W_r at column c is W_{r+2c-1} Omega*L and F^r at column c is
F^{r+c} Omega*L.
"""
from dataclasses import dataclass
from typing import Optional

from sympy import QQ
from tqdm import tqdm

from .complexes import (CohomologyProfile, CochainComplex, assemble, assemble_map, omega_model, support_radius,
                        koszul, koszul_edges, c_term, graded_weight, flat_subquotient_profile)
from .constants import PSI_MODES, DEFAULT_PSI_MODE
from .errors import InputError, ContractError, ResourceError
from .orbit import NilpotentOrbit
from .qlinalg import (LinMap, Subspace, Subquotient, whole, full_space, zero_space, span, intersect, kernel,
                      induced_block, iterated_graded)
from .scat import as_set, enumerate_chains, chains_through, deletions
from .util.misc import CheckRecord, subsets
from .weightcore import nilpotency_index


def _check_mode(mode):
    if mode not in PSI_MODES:
        raise InputError(f'mode must be one of {PSI_MODES}, got {mode!r}')
    return mode


def columns_for(mode, q):
    _check_mode(mode)
    if mode == 'cokernel':
        return list(range(-q, 1))
    return list(range(1, q + 2))


def truncation_step(orbit):
    """h = max nilpotency index + 1: how far a class must survive to be accepted."""
    return max((nilpotency_index(N) for N in orbit.nilpotents), default=0) + 1


def column_complex(orbit, multiplicities, columns, term_fn, chains=None):
    """s(X_c[c], eta) over `columns`, X_c(J, s.) = term_fn(J, s., c)."""
    model = omega_model(orbit)
    M = orbit.indices
    chains = enumerate_chains(M) if chains is None else chains
    eye = model.eye
    terms, edges = [], []
    for c in columns:
        for J in subsets(M, nonempty=False):
            for s in chains:
                terms.append(((J, s, c), model.degree(J, s), term_fn(J, s, c)))
                for (_, _), (Ji, _), sign, Ni in koszul_edges(orbit, J, s, M):
                    edges.append(((J, s, c), (Ji, s, c), sign, Ni))
                    i = next(x for x in Ji if x not in J)
                    edges.append(((J, s, c), (Ji, s, c + 1), -multiplicities[i - 1] * sign, eye))
                for t, e in deletions(s):
                    edges.append(((J, s, c), (J, t, c), (-1) ** len(J) * e, eye))
    return assemble(terms, edges)


def _psi_at(orbit, multiplicities, mode, q):
    L = whole(orbit.dim)
    return column_complex(orbit, multiplicities, columns_for(mode, q), lambda J, s, c: L)


def shift_map(src, dst, k):
    """nu^k between column complexes: (J, s., c) -> (J, s., c+k), identity on L."""
    eye = LinMap.identity(_ambient(src, dst)).matrix
    edges = [(label, label[:2] + (label[2] + k,), 1, eye) for label in src.index]
    return assemble_map(src, dst, edges)


def _ambient(*complexes):
    for cx in complexes:
        for label, (_, _, sq) in cx.index.items():
            return sq.ambient_dim
    return 0


def _truncation_map(small, big, mode):
    eye = LinMap.identity(_ambient(small, big)).matrix
    edges = [(label, label, 1, eye) for label in small.index]
    if mode == 'cokernel':
        return assemble_map(small, big, edges)
    return assemble_map(big, small, edges)


def _accepted(small, big, mode):
    F = _truncation_map(small, big, mode)
    return F, CohomologyProfile({d: F.induced_rank(d) for d in F.src.degrees()})


@dataclass
class PsiComplex:
    """A truncation of Psi^0_M L accepted by the stabilization search."""
    orbit: NilpotentOrbit
    multiplicities: tuple
    mode: str
    p_max: int
    step: int
    complex: CochainComplex
    big: CochainComplex
    accepted: CohomologyProfile
    previous: Optional[CohomologyProfile] = None

    @property
    def columns(self):
        return columns_for(self.mode, self.p_max)

    @property
    def i0(self):
        return support_radius(self.orbit)


def build_psi(orbit, multiplicities=None, p_max=None, mode=DEFAULT_PSI_MODE, verbose=False):
    """Build Psi and accept a truncation.

    The accepted cohomology at q is the per-degree rank of H(Psi_q) -> H(Psi_{q+h})
    (cokernel mode) or H(Psi_{q+h}) -> H(Psi_q) (kernel mode). Without an explicit
    p_max the least q >= i0 whose accepted cohomology equals the one at q+1 is used.
    """
    _check_mode(mode)
    mults = orbit.get_multiplicities(multiplicities)
    i0 = support_radius(orbit)
    h = truncation_step(orbit)
    cache = {}

    def at(q):
        if q not in cache:
            cache[q] = _psi_at(orbit, mults, mode, q)
        return cache[q]

    if p_max is not None:
        if p_max < i0:
            raise InputError(f'p_max = {p_max} is below the support radius i0 = {i0}')
        _, prof = _accepted(at(p_max), at(p_max + h), mode)
        return PsiComplex(orbit, mults, mode, p_max, h, at(p_max), at(p_max + h), prof)

    cap = orbit.dim * orbit.n + i0
    _, prof = _accepted(at(i0), at(i0 + h), mode)
    prev = None
    for q in tqdm(range(i0, cap + 1), desc='psi truncation', disable=not verbose):
        _, nxt = _accepted(at(q + 1), at(q + 1 + h), mode)
        if nxt == prof:
            return PsiComplex(orbit, mults, mode, q, h, at(q), at(q + h), prof, previous=nxt)
        prev, prof = prof, nxt
        for old in [k for k in cache if k < q + 1]:
            del cache[old]
    raise ResourceError(f'psi truncation did not stabilize up to q = {cap}: '
                        f'last profiles {prev.to_dict()} and {prof.to_dict()}')


def psi_exact_profile(orbit, multiplicities=None, mode=DEFAULT_PSI_MODE):
    """H(Psi) = H(Koszul(L; N_i - (n_i/n_1) N_1, i >= 2)), one degree up in kernel mode."""
    _check_mode(mode)
    prof = _reduced_koszul(orbit, multiplicities).profile()
    return prof.shifted(1) if mode == 'kernel' else prof


def _reduced_family(orbit, multiplicities):
    mults = orbit.get_multiplicities(multiplicities)
    N1 = orbit.nilpotent(1)
    return tuple(orbit.nilpotent(i) - N1.scale(QQ(mults[i - 1], mults[0])) for i in orbit.indices[1:])


def _reduced_koszul(orbit, multiplicities):
    return koszul(NilpotentOrbit(orbit.dim, _reduced_family(orbit, multiplicities)))


def psi_nu_oracle(orbit, multiplicities=None, mode=DEFAULT_PSI_MODE):
    """Per-degree rank of N_1 on the reduced Koszul cohomology; nu acts there as N_1 / n_1."""
    K = _reduced_koszul(orbit, multiplicities)
    N1 = orbit.nilpotent(1).matrix
    F = assemble_map(K, K, [(label, label, 1, N1) for label in K.index])
    ranks = CohomologyProfile({d: F.induced_rank(d) for d in K.degrees()})
    return ranks.shifted(1) if mode == 'kernel' else ranks


class NuAction(object):
    """The column shift nu on a PsiComplex."""

    def __init__(self, psi):
        self.psi = psi
        self.map = shift_map(psi.complex, psi.complex, 1)

    def power(self, k, big=False):
        cx = self.psi.big if big else self.psi.complex
        return shift_map(cx, cx, k)

    def is_nilpotent(self):
        top = self.power(len(self.psi.columns))
        return all(not m.to_dod() for m in top.mats.values())


def nu(psi):
    return NuAction(psi)


def _rows_through(rows, F, d):
    if rows.shape[0] == 0:
        return rows
    return rows * F.matrix(d).transpose()


def nu_power_on_H(psi, k):
    """Per-degree rank of nu^k on the accepted cohomology."""
    small, big = psi.complex, psi.big
    T = _truncation_map(small, big, psi.mode)
    V = shift_map(big, big, k)
    ranks = {}
    if psi.mode == 'cokernel':
        for d in small.degrees():
            Z = small.cocycles(d)
            if Z.rank == 0 or not big.dim(d):
                continue
            rows = _rows_through(_rows_through(Z.matrix(), T, d), V, d)
            B = big.coboundaries(d)
            ranks[d] = span(_rows_space(rows, big.dim(d)), B).rank - B.rank
    else:
        for d in big.degrees():
            Z = big.cocycles(d)
            if Z.rank == 0 or not small.dim(d):
                continue
            rows = _rows_through(_rows_through(Z.matrix(), V, d), T, d)
            B = small.coboundaries(d)
            ranks[d] = span(_rows_space(rows, small.dim(d)), B).rank - B.rank
    return CohomologyProfile(ranks)


def _rows_space(rows, n):
    if rows.shape[0] == 0:
        return zero_space(n)
    return Subspace.from_matrix(rows)


def psi_build_check(psi):
    exact = psi_exact_profile(psi.orbit, psi.multiplicities, psi.mode)
    nu_ranks = nu_power_on_H(psi, 1)
    nu_exact = psi_nu_oracle(psi.orbit, psi.multiplicities, psi.mode)
    params = {'mode': psi.mode, 'multiplicities': psi.multiplicities}
    return [
        CheckRecord('psi.stabilized', dict(params, p_max=psi.p_max), psi.previous in (None, psi.accepted),
                    {'accepted': psi.accepted.to_dict(), 'next': psi.previous.to_dict() if psi.previous else None}),
        CheckRecord('psi.reduction', params, psi.accepted == exact,
                    {'accepted': psi.accepted.to_dict(), 'koszul': exact.to_dict()}),
        CheckRecord('psi.nu_on_cohomology', params, nu_ranks == nu_exact,
                    {'nu': nu_ranks.to_dict(), 'N1': nu_exact.to_dict()}),
    ]


### weight and Hodge on Psi

def weight_index(r, c):
    return r + 2 * c - 1


def psi_weight(psi, r, big=False):
    """Per-degree subspaces W_r of the Psi complex; the subcomplex property is asserted."""
    model = omega_model(psi.orbit)
    cx = psi.big if big else psi.complex
    spaces = {d: cx.embed(d, {(J, s, c): model.weight_space(J, s, weight_index(r, c)) for J, s, c in cx.labels(d)})
              for d in cx.degrees()}
    bad = cx.preserves(spaces)
    if bad:
        raise ContractError(f'W_{r} of Psi is not a subcomplex in degrees {bad}')
    return spaces


def psi_hodge(psi, p):
    model = omega_model(psi.orbit)
    cx = psi.complex
    return {d: cx.embed(d, {(J, s, c): model.hodge_space(J, p + c) for J, s, c in cx.labels(d)})
            for d in cx.degrees()}


def psi_graded(psi, r, columns=None):
    """Gr_r Psi = s(Gr_{r+2c-1} Omega*L [c], eta) over the columns of psi."""
    model = omega_model(psi.orbit)
    columns = psi.columns if columns is None else columns
    return column_complex(psi.orbit, psi.multiplicities, columns,
                          lambda J, s, c: Subquotient(model.weight_space(J, s, weight_index(r, c)),
                                                      model.weight_space(J, s, weight_index(r, c) - 1)))


def window(psi, r):
    """Columns of I(r): kernel mode |r|+1 <= r+2c-1 <= i0, cokernel mode -i0 <= r+2c-1 <= -|r|-1."""
    i0 = psi.i0
    if psi.mode == 'kernel':
        return [c for c in psi.columns if abs(r) + 1 <= weight_index(r, c) <= i0]
    return [c for c in psi.columns if -i0 <= weight_index(r, c) <= -abs(r) - 1]


def window_complement(psi, r):
    """Columns with a nonzero Gr term outside I(r): the low columns 1..-r (kernel mode, r < 0)
    or the top columns 1-r..0 (cokernel mode, r > 0)."""
    i0 = psi.i0
    win = set(window(psi, r))
    return [c for c in psi.columns if c not in win and abs(weight_index(r, c)) <= i0]


def window_check(psi, r):
    """Terms vanish off |r+2c-1| <= i0, and the part of Gr_r outside I(r) is acyclic."""
    full = psi_graded(psi, r)
    live = sorted({label[2] for label in full.index})
    outside = [c for c in live if abs(weight_index(r, c)) > psi.i0]
    rest = window_complement(psi, r)
    rest_profile = psi_graded(psi, r, columns=rest).profile() if rest else CohomologyProfile()
    win_profile = psi_graded(psi, r, columns=window(psi, r)).profile()
    ok = not outside and rest_profile.is_acyclic() and win_profile == full.profile()
    return CheckRecord('psi.window', {'r': r, 'mode': psi.mode}, ok,
                       {'live_columns': live, 'window': window(psi, r), 'complement': rest,
                        'complement_profile': rest_profile.to_dict(), 'profile': full.profile().to_dict()})


def psi_km(psi, K, r):
    """Psi^{KM}_r = s(C^{KM}_{r+2c-1}[c], eta)."""
    K = as_set(K)
    orbit = psi.orbit
    return column_complex(orbit, psi.multiplicities, psi.columns,
                          lambda J, s, c: c_term(orbit, K, J, s, weight_index(r, c)),
                          chains=chains_through(orbit.indices, K))


def psi_decomposition_check(psi, r):
    lhs = psi_graded(psi, r).profile()
    parts = {K: psi_km(psi, K, r).profile() for K in subsets(psi.orbit.indices)}
    rhs = CohomologyProfile()
    for p in parts.values():
        rhs = rhs + p
    return CheckRecord('psi.decomposition', {'r': r, 'mode': psi.mode}, lhs == rhs,
                       {'graded': lhs.to_dict(), 'parts': {K: p.to_dict() for K, p in parts.items() if p.dims}})


def _contained_after(F, spaces_src, spaces_dst):
    bad = []
    for d, S in spaces_src.items():
        if S.rank == 0:
            continue
        e = d + F.shift
        image = _rows_space(_rows_through(S.matrix(), F, d), F.dst.dim(e))
        if not spaces_dst.get(e, zero_space(F.dst.dim(e))).contains(image):
            bad.append(d)
    return bad


def monodromy_weight_check(psi, verbose=False):
    """nu drops W by two and F by one, and nu^r: Gr_r -> Gr_{-r} is a quasi-isomorphism for r >= 1."""
    params = {'mode': psi.mode, 'multiplicities': psi.multiplicities}
    records = []
    try:
        action = nu(psi)
    except ContractError as e:
        return [CheckRecord('psi.nu_chain_map', params, False, {'error': str(e)})]
    records.append(CheckRecord('psi.nu_chain_map', params, action.is_nilpotent(), {'p_max': psi.p_max}))

    i0 = psi.i0
    rs = range(-i0 - 1, i0 + 2)
    bad = {}
    for r in tqdm(rs, desc='nu weight', disable=not verbose):
        v = _contained_after(action.map, psi_weight(psi, r), psi_weight(psi, r - 2))
        if v:
            bad[r] = v
    records.append(CheckRecord('psi.nu_weight_drop', params, not bad, {'violations': bad}))

    if psi.orbit.hodge is not None:
        jumps = psi.orbit.hodge.jumps() or [0]
        bad = {}
        for p in range(min(jumps) - psi.p_max - 2, max(jumps) + psi.orbit.n + psi.p_max + 2):
            v = _contained_after(action.map, psi_hodge(psi, p), psi_hodge(psi, p - 1))
            if v:
                bad[p] = v
        records.append(CheckRecord('psi.nu_hodge_drop', params, not bad, {'violations': bad}))

    for r in tqdm(range(1, i0 + 1), desc='nu^r', disable=not verbose):
        src, dst = psi_graded(psi, r), psi_graded(psi, -r)
        try:
            ok, details = shift_map(src, dst, r).is_quasi_isomorphism()
        except ContractError as e:
            ok, details = False, {'error': str(e)}
        records.append(CheckRecord('psi.monodromy_bijection', dict(params, r=r), ok, {'ranks': details}))
        a, b = src.profile(), dst.profile()
        records.append(CheckRecord('psi.graded_symmetry', dict(params, r=r), a == b,
                                   {'gr_r': a.to_dict(), 'gr_minus_r': b.to_dict()}))
    return records


### bridges to Omega*L

def ker_coker_bridge_check(psi, r):
    """Cokernel mode: Gr_r(ker nu) = Gr_{r-1} Omega*L. Kernel mode: Gr_r(coker nu) = Gr_{r+1} Omega*L."""
    model = omega_model(psi.orbit)
    cx = psi.complex
    n = psi.orbit.dim

    def spaces(level, fill_rest):
        out = {}
        for d in cx.degrees():
            per = {}
            for J, s, c in cx.labels(d):
                if psi.mode == 'cokernel':
                    per[(J, s, c)] = model.weight_space(J, s, weight_index(level, c)) if c == 0 else zero_space(n)
                elif c == 1:
                    per[(J, s, c)] = model.weight_space(J, s, weight_index(level, c))
                else:
                    per[(J, s, c)] = full_space(n) if fill_rest else zero_space(n)
            out[d] = cx.embed(d, per)
        return out

    got = flat_subquotient_profile(cx, spaces(r, True), spaces(r - 1, True))
    target = r - 1 if psi.mode == 'cokernel' else r + 1
    expected = graded_weight(psi.orbit, target).profile()
    return CheckRecord('psi.ker_coker_bridge', {'r': r, 'mode': psi.mode}, got == expected,
                       {'psi_side': got.to_dict(), 'omega_side': expected.to_dict(), 'omega_weight': target})


### A-complexes and the kernel of nu powers

def a_complex(orbit, K, i, M=None, multiplicities=None):
    """A^{KM}_i = s(C^{KM}_{i+2p-1}[p], eta) over 1-i <= p <= 0."""
    if i < 1:
        raise InputError('A_i needs i >= 1')
    K = as_set(K)
    M = orbit.indices if M is None else as_set(M)
    if M != orbit.indices:
        raise InputError('A^{KM} is built over the full index set of the orbit')
    mults = orbit.get_multiplicities(multiplicities)
    return column_complex(orbit, mults, list(range(1 - i, 1)),
                          lambda J, s, c: c_term(orbit, K, J, s, i + 2 * c - 1),
                          chains=chains_through(M, K))


def a_complex_on(orbit, K, i, multiplicities=None):
    """A^K_i over the sub-orbit (N_k, k in K)."""
    K = as_set(K)
    sub = NilpotentOrbit(orbit.dim, tuple(orbit.nilpotent(k) for k in K),
                         labels=tuple(orbit.labels[k - 1] for k in K))
    mults = orbit.get_multiplicities(multiplicities)
    return a_complex(sub, sub.indices, i, multiplicities=tuple(mults[k - 1] for k in K))


def a_complex_check(orbit, K, i, M=None):
    if M is None:
        cx = a_complex_on(orbit, K, i)
    else:
        cx = a_complex(orbit, K, i, M=M)
    prof = cx.profile()
    return CheckRecord('psi.a_acyclic', {'K': as_set(K), 'i': i, 'M': as_set(M) if M else None},
                       prof.is_acyclic(), {'profile': prof.to_dict(), 'chain_dims': cx.chain_dims()})


def ker_nu_power_check(orbit, i, multiplicities=None):
    """s(Gr_{i+2p-1} Omega*L [p], eta) over -i < p <= 0 is acyclic for i >= 1."""
    if i < 1:
        raise InputError('need i >= 1')
    model = omega_model(orbit)
    mults = orbit.get_multiplicities(multiplicities)
    cx = column_complex(orbit, mults, list(range(1 - i, 1)),
                        lambda J, s, c: Subquotient(model.weight_space(J, s, i + 2 * c - 1),
                                                    model.weight_space(J, s, i + 2 * c - 2)))
    prof = cx.profile()
    return CheckRecord('psi.ker_nu_power', {'i': i}, prof.is_acyclic(), {'profile': prof.to_dict()})


### primitive parts

def _check_m(K, m):
    K = as_set(K)
    m = tuple(int(x) for x in m)
    if len(m) != len(K):
        raise InputError(f'm has {len(m)} entries for K = {K}')
    if min(m, default=2) < 2:
        raise InputError(f'primitive parts need all m_i >= 2, got {m}')
    return K, m


def _primitive_coords(orbit, K, m):
    ws = [orbit.w_multi((k,)) for k in K]
    G = iterated_graded(ws, [x - 2 for x in m])
    P = full_space(G.dim)
    for slot, (k, mk) in enumerate(zip(K, m)):
        idx = [x - 2 for x in m]
        idx[slot] = -mk
        T = iterated_graded(ws, idx)
        block = induced_block(orbit.nilpotent(k).power(mk - 1).matrix, G, T)
        P = intersect(P, _block_kernel(block, G.dim))
    return G, P


def _block_kernel(block, n):
    if block.shape[0] == 0:
        return full_space(n)
    return kernel(LinMap(block))


def primitive_part(orbit, K, m):
    """P(m.) = & ker N_i^{m_i - 1} inside Gr_{m.-2}, as a Subquotient of L over the same denominator."""
    K, m = _check_m(K, m)
    G, P = _primitive_coords(orbit, K, m)
    if G.dim == 0:
        return G
    return Subquotient(G.lift_subspace(P), G.denominator)


def primitive_expected_dim(orbit, K, m):
    """dim Gr_{m.-2} (L / sum N_i L)."""
    K, m = _check_m(K, m)
    n = orbit.dim
    S = span(zero_space(n), *[orbit.nilpotent(k).push(full_space(n)) for k in K])
    ws = [orbit.w_multi((k,)) for k in K]
    return iterated_graded(ws, [x - 2 for x in m], start=Subquotient(full_space(n), S)).dim


def gamma_check(orbit, K, m):
    """prod N_i^{m_i-2} maps P(m.) injectively onto the image of Gr_{-m.+2}(& ker N_i)."""
    K, m = _check_m(K, m)
    n = orbit.dim
    G, P = _primitive_coords(orbit, K, m)
    ws = [orbit.w_multi((k,)) for k in K]
    low = [2 - x for x in m]
    T = iterated_graded(ws, low)
    gamma = LinMap.identity(n)
    for k, mk in zip(K, m):
        gamma = orbit.nilpotent(k).power(mk - 2).compose(gamma)
    block = induced_block(gamma.matrix, G, T)
    image = _rows_space(P.matrix() * block.transpose(), T.dim) if P.rank and T.dim else zero_space(T.dim)

    ker = intersect(*[kernel(orbit.nilpotent(k)) for k in K])
    S = iterated_graded(ws, low, start=Subquotient(ker, zero_space(n)))
    inc = induced_block(LinMap.identity(n).matrix, S, T)
    target = _rows_space(inc.transpose(), T.dim) if S.dim and T.dim else zero_space(T.dim)

    expected = primitive_expected_dim(orbit, K, m)
    ok = image.rank == P.rank and image == target and P.rank == expected
    return CheckRecord('psi.gamma', {'K': K, 'm': m}, ok,
                       {'primitive': P.rank, 'expected': expected, 'image': image.rank, 'target': target.rank})
