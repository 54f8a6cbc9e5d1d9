"""
Cochain complexes assembled from subquotients of a fixed space L.

Every complex here has generators labelled by hashable tuples, each carrying
a Subquotient of L, and differentials given edge by edge as (coefficient,
map on L). `assemble` turns that into block matrices in the quotient
coordinates of each term and checks d^2 = 0.

Builders: the Koszul complex, the combinatorial complex Omega*L over
M+ x S(M) with its weight and Hodge filtrations, C^{KM}_r, elementary and
combinatorial elementary complexes, the T-embeddings, IC(L). Checkers
return CheckRecords.
"""
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product

from sympy import QQ

from .constants import WINDOW_MARGIN
from .errors import InputError, ContractError
from .qlinalg import (LinMap, Subspace, Subquotient, whole, full_space, zero_space, span, intersect,
                      preimage, image, kernel, kernel_of_matrix, image_of_matrix, induced_block,
                      iterated_graded, joint_graded, matrix_rank, dm, dm_zeros)
from .scat import (as_set, enumerate_chains, enumerate_biindices, chains_through, deletions,
                   koszul_sign, removal_sign, is_maximal)
from .util.misc import CheckRecord, subsets
from .orbit import NilpotentOrbit


@dataclass
class CohomologyProfile:
    """Per-degree cohomology dimensions; zero degrees are dropped."""
    dims: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    def __post_init__(self):
        assert all(v >= 0 for v in self.dims.values()), f'negative cohomology dimension in {self.dims}'
        self.dims = {d: v for d, v in sorted(self.dims.items()) if v}

    def dim(self, d):
        return self.dims.get(d, 0)

    def total(self):
        return sum(self.dims.values())

    def is_acyclic(self):
        return not self.dims

    def concentrated(self):
        """(degree, dim) if at most one degree is nonzero, (None, 0) if acyclic, else None."""
        if not self.dims:
            return None, 0
        if len(self.dims) == 1:
            return next(iter(self.dims.items()))
        return None

    def shifted(self, e):
        return CohomologyProfile({d + e: v for d, v in self.dims.items()})

    def euler(self):
        return sum((-1) ** d * v for d, v in self.dims.items())

    def __add__(self, other):
        dims = dict(self.dims)
        for d, v in other.dims.items():
            dims[d] = dims.get(d, 0) + v
        return CohomologyProfile(dims)

    def __eq__(self, other):
        if not isinstance(other, CohomologyProfile):
            return NotImplemented
        return self.dims == other.dims

    def to_dict(self):
        return dict(self.dims)


class CochainComplex(object):
    """Bounded complex with terms blocks[d] = [(label, Subquotient)], d: C^d -> C^{d+1}."""

    def __init__(self, blocks, diffs, check=True):
        self.blocks = {d: list(b) for d, b in sorted(blocks.items()) if b}
        self.index = {}
        self.dims = {}
        for d, block in self.blocks.items():
            offset = 0
            for label, sq in block:
                self.index[label] = (d, offset, sq)
                offset += sq.dim
            self.dims[d] = offset
        self.diffs = diffs
        self._ranks = {}
        if check:
            self.check_square_zero()

    def degrees(self):
        return sorted(self.dims)

    def dim(self, d):
        return self.dims.get(d, 0)

    def total_dim(self):
        return sum(self.dims.values())

    def labels(self, d):
        return [label for label, _ in self.blocks.get(d, [])]

    def diff(self, d):
        if d in self.diffs:
            return self.diffs[d]
        return dm_zeros((self.dim(d + 1), self.dim(d)))

    def rank(self, d):
        if d not in self._ranks:
            self._ranks[d] = matrix_rank(self.diff(d)) if self.dim(d) and self.dim(d + 1) else 0
        return self._ranks[d]

    def check_square_zero(self):
        for d in self.degrees():
            if not (self.dim(d) and self.dim(d + 1) and self.dim(d + 2)):
                continue
            if (self.diff(d + 1) * self.diff(d)).to_dod():
                raise ContractError(f'd^2 != 0 in degree {d}')

    def profile(self):
        dims = {d: self.dim(d) - self.rank(d) - self.rank(d - 1) for d in self.degrees()}
        return CohomologyProfile(dims)

    def chain_dims(self):
        return {d: v for d, v in self.dims.items() if v}

    def cocycles(self, d):
        if not self.dim(d + 1):
            return full_space(self.dim(d))
        return kernel_of_matrix(self.diff(d))

    def coboundaries(self, d):
        if not self.dim(d - 1):
            return zero_space(self.dim(d))
        return image_of_matrix(self.diff(d - 1))

    def embed(self, d, spaces):
        """Direct sum of per-term subspaces of L (each inside its term's numerator), in C^d coordinates."""
        dod, rows = {}, 0
        for label, sq in self.blocks.get(d, []):
            S = spaces.get(label)
            if S is None or S.rank == 0:
                continue
            _, offset, _ = self.index[label]
            X = S.matrix() * sq.coords.transpose()
            for i, row in X.to_dod().items():
                dod[rows + i] = {offset + j: v for j, v in row.items()}
            rows += S.rank
        if not dod:
            return zero_space(self.dim(d))
        return Subspace.from_matrix(dm(dod, (rows, self.dim(d))))

    def push(self, d, S):
        """d(S) for a subspace S of C^d."""
        if S.rank == 0 or not self.dim(d + 1):
            return zero_space(self.dim(d + 1))
        return Subspace.from_matrix(S.matrix() * self.diff(d).transpose())

    def preserves(self, spaces):
        """Degrees d where d(spaces[d]) is not inside spaces[d+1]."""
        bad = []
        for d in self.degrees():
            S = spaces.get(d, zero_space(self.dim(d)))
            T = spaces.get(d + 1, zero_space(self.dim(d + 1)))
            if not T.contains(self.push(d, S)):
                bad.append(d)
        return bad

    def __repr__(self):
        return f'CochainComplex(dims={self.chain_dims()})'


def assemble(terms, edges, check=True):
    """Build a complex from terms [(label, degree, Subquotient)] and edges [(src, dst, coeff, matrix)].

    Zero-dimensional terms are dropped and edges touching missing labels are skipped.
    """
    blocks = defaultdict(list)
    for label, deg, sq in terms:
        if sq.dim:
            blocks[deg].append((label, sq))
    cx = CochainComplex(blocks, {}, check=False)
    dods = defaultdict(dict)
    for src, dst, coeff, fmat in edges:
        if src not in cx.index or dst not in cx.index:
            continue
        ds, os, sqs = cx.index[src]
        dd, od, sqd = cx.index[dst]
        if dd != ds + 1:
            raise ContractError(f'edge {src} -> {dst} does not raise degree by one')
        block = induced_block(fmat, sqs, sqd)
        _accumulate(dods[ds], block, od, os, QQ(coeff))
    cx.diffs = {d: dm(_strip(dod), (cx.dim(d + 1), cx.dim(d))) for d, dod in dods.items()}
    if check:
        cx.check_square_zero()
    return cx


def _accumulate(dod, block, row_off, col_off, coeff):
    for i, row in block.to_dod().items():
        target = dod.setdefault(row_off + i, {})
        for j, v in row.items():
            target[col_off + j] = target.get(col_off + j, QQ(0)) + coeff * v


def _strip(dod):
    out = {}
    for i, row in dod.items():
        row = {j: v for j, v in row.items() if v}
        if row:
            out[i] = row
    return out


class ChainMap(object):
    """Degree-`shift` map src -> dst given per source degree."""

    def __init__(self, src, dst, mats, shift=0, check=True):
        self.src, self.dst, self.mats, self.shift = src, dst, mats, shift
        if check:
            self.check()

    def matrix(self, d):
        if d in self.mats:
            return self.mats[d]
        return dm_zeros((self.dst.dim(d + self.shift), self.src.dim(d)))

    def check(self):
        for d in sorted(set(self.src.degrees()) | {d - 1 for d in self.src.degrees()}):
            e = d + self.shift
            if not (self.dst.dim(e + 1) and (self.src.dim(d) or self.src.dim(d + 1))):
                continue
            lhs = self.dst.diff(e) * self.matrix(d) if self.src.dim(d) and self.dst.dim(e) else None
            rhs = self.matrix(d + 1) * self.src.diff(d) if self.src.dim(d) and self.src.dim(d + 1) else None
            lhs_dod = lhs.to_dod() if lhs is not None else {}
            rhs_dod = rhs.to_dod() if rhs is not None else {}
            if lhs_dod != rhs_dod:
                raise ContractError(f'not a chain map in degree {d}')

    def induced_rank(self, d):
        """rank of H^d(src) -> H^{d+shift}(dst): rank([F(Z); B]) - rank(B)."""
        e = d + self.shift
        if not (self.src.dim(d) and self.dst.dim(e)):
            return 0
        Z = self.src.cocycles(d)
        if Z.rank == 0:
            return 0
        B = self.dst.coboundaries(e)
        FZ = Subspace.from_matrix(Z.matrix() * self.matrix(d).transpose())
        return span(FZ, B).rank - B.rank

    def is_quasi_isomorphism(self):
        hs, ht = self.src.profile(), self.dst.profile()
        details, ok = {}, True
        for d in sorted(set(hs.dims) | {e - self.shift for e in ht.dims}):
            rank = self.induced_rank(d)
            details[d] = {'src': hs.dim(d), 'dst': ht.dim(d + self.shift), 'rank': rank}
            ok = ok and hs.dim(d) == ht.dim(d + self.shift) == rank
        return ok, details


def assemble_map(src, dst, edges, shift=0, check=True):
    """Chain map from edges [(src_label, dst_label, coeff, matrix on L)]."""
    dods = defaultdict(dict)
    for a, b, coeff, fmat in edges:
        if a not in src.index or b not in dst.index:
            continue
        da, oa, sqa = src.index[a]
        db, ob, sqb = dst.index[b]
        if db != da + shift:
            raise ContractError(f'map edge {a} -> {b} has the wrong degree')
        _accumulate(dods[da], induced_block(fmat, sqa, sqb), ob, oa, QQ(coeff))
    mats = {d: dm(_strip(dod), (dst.dim(d + shift), src.dim(d))) for d, dod in dods.items()}
    return ChainMap(src, dst, mats, shift=shift, check=check)


def flat_subquotient_profile(cx, hi, lo):
    """Cohomology of the subquotient complex hi/lo, both given as per-degree subspaces of C^d.

    H^d = (preimage(d, lo_{d+1}) & hi_d) / (lo_d + d(hi_{d-1})).
    """
    dims = {}
    for d in cx.degrees():
        hi_d = hi.get(d, zero_space(cx.dim(d)))
        lo_d = lo.get(d, zero_space(cx.dim(d)))
        if cx.dim(d + 1):
            lo_next = lo.get(d + 1, zero_space(cx.dim(d + 1)))
            z = intersect(preimage(LinMap(cx.diff(d)), lo_next), hi_d)
        else:
            z = hi_d
        b = span(lo_d, cx.push(d - 1, hi.get(d - 1, zero_space(cx.dim(d - 1)))))
        dims[d] = z.rank - b.rank
    return CohomologyProfile(dims)


### Omega*L and its filtrations

def a_index(s, J, r):
    """a_{s}(J, r) = |s| - 2|s & J| + r."""
    return len(s) - 2 * len(set(s) & set(J)) + r


class OmegaModel(object):
    """Biindices, weight levels and edges of Omega*L for one orbit."""

    def __init__(self, orbit):
        self.orbit = orbit
        self.M = orbit.indices
        self.biindices = enumerate_biindices(self.M)
        self.eye = LinMap.identity(orbit.dim).matrix
        self._weight = {}

    def degree(self, J, chain):
        return len(J) + len(self.M) - len(chain)

    def weight_space(self, J, chain, r):
        """W_r(J, s.) = & over s in s. of W^s_{a_s(J, r)}."""
        key = (J, chain, r)
        if key not in self._weight:
            if not chain:
                self._weight[key] = full_space(self.orbit.dim)
            else:
                self._weight[key] = intersect(*[self.orbit.w_multi(s).level(a_index(s, J, r)) for s in chain])
        return self._weight[key]

    def hodge_space(self, J, p):
        F = self.orbit.hodge
        if F is None:
            raise InputError('orbit has no Hodge filtration')
        return F.level(p - len(J))

    def edges(self, indices=None, chains=None):
        """Koszul edges (J, s) -> (J+i, s) and deletion edges (J, s) -> (J, s - s_i)."""
        indices = self.M if indices is None else indices
        chains = enumerate_chains(self.M) if chains is None else chains
        for J in subsets(indices, nonempty=False):
            for s in chains:
                yield from koszul_edges(self.orbit, J, s, indices)
                for t, e in deletions(s):
                    yield (J, s), (J, t), (-1) ** len(J) * e, self.eye


def koszul_edges(orbit, J, tag, indices):
    for i in indices:
        if i in J:
            continue
        Ji = tuple(sorted(J + (i,)))
        yield (J, tag), (Ji, tag), koszul_sign(i, J), orbit.nilpotent(i).matrix


def omega_model(orbit):
    return orbit.memo('omega', lambda: OmegaModel(orbit))


def support_radius(orbit):
    """i0 = max over nonempty J of the radius of W^J, plus |M|."""
    def compute():
        radius = max((orbit.w_multi(J).radius() for J in subsets(orbit.indices)), default=0)
        return radius + orbit.n
    return orbit.memo('i0', compute)


def r_window(orbit, margin=None):
    margin = WINDOW_MARGIN if margin is None else margin
    i0 = support_radius(orbit)
    return list(range(-i0 - margin, i0 + margin + 1))


def koszul(orbit, universe=None):
    """s(L(J), N.): L at each J of the universe, N_i with the sign of i's position."""
    universe = orbit.indices if universe is None else as_set(universe)
    L = whole(orbit.dim)
    terms = [((J, ()), len(J), L) for J in subsets(universe, nonempty=False)]
    edges = [e for J in subsets(universe, nonempty=False) for e in koszul_edges(orbit, J, (), universe)]
    return assemble(terms, edges)


def _omega_terms(orbit, term_fn):
    model = omega_model(orbit)
    return [((b.J, b.chain), model.degree(b.J, b.chain), term_fn(model, b.J, b.chain)) for b in model.biindices]


def omega_star(orbit):
    model = omega_model(orbit)
    L = whole(orbit.dim)
    return assemble(_omega_terms(orbit, lambda m, J, s: L), model.edges())


def omega_weight(orbit, r):
    """The subcomplex W_r Omega*L."""
    n = orbit.dim
    return assemble(_omega_terms(orbit, lambda m, J, s: Subquotient(m.weight_space(J, s, r), zero_space(n))),
                    omega_model(orbit).edges())


def omega_hodge(orbit, p):
    """The subcomplex F^p Omega*L, F^{p-|J|}L at (J, s.)."""
    n = orbit.dim
    return assemble(_omega_terms(orbit, lambda m, J, s: Subquotient(m.hodge_space(J, p), zero_space(n))),
                    omega_model(orbit).edges())


def graded_weight(orbit, r):
    """Gr_r Omega*L = W_r / W_{r-1}."""
    return assemble(_omega_terms(orbit, lambda m, J, s: Subquotient(m.weight_space(J, s, r),
                                                                    m.weight_space(J, s, r - 1))),
                    omega_model(orbit).edges())


class FilteredComplex(object):
    """A complex with a filtration by subcomplexes given termwise on L."""

    def __init__(self, complex, level_fn):
        self.complex = complex
        self.level_fn = level_fn

    def level(self, r):
        cx = self.complex
        return {d: cx.embed(d, {label: self.level_fn(label, r) for label in cx.labels(d)}) for d in cx.degrees()}

    def subcomplex_violations(self, r):
        return self.complex.preserves(self.level(r))


def omega_weight_filtered(orbit):
    model = omega_model(orbit)
    return FilteredComplex(omega_star(orbit), lambda label, r: model.weight_space(label[0], label[1], r))


def omega_hodge_filtered(orbit):
    model = omega_model(orbit)
    return FilteredComplex(omega_star(orbit), lambda label, p: model.hodge_space(label[0], p))


def subcomplex_check(orbit, rs=None):
    """d(W_r) in W_r and d(F^p) in F^p, degree by degree."""
    rs = r_window(orbit) if rs is None else rs
    W = omega_weight_filtered(orbit)
    bad = {r: W.subcomplex_violations(r) for r in rs}
    bad = {r: v for r, v in bad.items() if v}
    records = [CheckRecord('omega.weight_subcomplex', {}, not bad, {'violations': bad})]
    if orbit.hodge is not None:
        F = omega_hodge_filtered(orbit)
        jumps = orbit.hodge.jumps() or [0]
        ps = range(min(jumps) - 1, max(jumps) + orbit.n + 2)
        bad = {p: F.subcomplex_violations(p) for p in ps}
        bad = {p: v for p, v in bad.items() if v}
        records.append(CheckRecord('omega.hodge_subcomplex', {}, not bad, {'violations': bad}))
    return records


def exhaustion_check(orbit):
    """W_r = everything for r >= i0 + 1 and W_r = 0 for r <= -i0 - 1."""
    model = omega_model(orbit)
    i0 = support_radius(orbit)
    top = all(model.weight_space(b.J, b.chain, i0 + 1).is_full() for b in model.biindices)
    bottom = all(model.weight_space(b.J, b.chain, -i0 - 1).is_zero() for b in model.biindices)
    return CheckRecord('omega.exhaustion', {'i0': i0}, top and bottom, {'top_full': top, 'bottom_zero': bottom})


def euler_check(orbit):
    """chi(Omega*L) = sum_r chi(Gr_r) and chi(Gr_r) = sum_K chi(C^{KM}_r)."""
    chi = omega_star(orbit).profile().euler()
    per_r, ok = {}, True
    for r in r_window(orbit, margin=1):
        g = graded_weight(orbit, r).profile().euler()
        parts = sum(c_complex(orbit, K, orbit.indices, r).profile().euler() for K in subsets(orbit.indices))
        per_r[r] = (g, parts)
        ok = ok and g == parts
    ok = ok and chi == sum(g for g, _ in per_r.values())
    return CheckRecord('omega.euler', {}, ok, {'chi': chi, 'graded': per_r})


def omega_koszul_check(orbit):
    """The S(M) direction resolves the constant functor: H(Omega*L) = H(Koszul)."""
    a, b = omega_star(orbit).profile(), koszul(orbit).profile()
    return CheckRecord('omega.koszul', {}, a == b, {'omega': a.to_dict(), 'koszul': b.to_dict()})


### C^{KM}_r

def _check_KM(orbit, K, M):
    K, M = as_set(K), as_set(M)
    if not K:
        raise InputError('K must be nonempty')
    if not set(K) <= set(M) or not set(M) <= set(orbit.indices):
        raise InputError(f'need K <= M <= {orbit.indices}, got K={K}, M={M}')
    return K, M


def c_term(orbit, K, J, chain, r):
    """(& over s != K of W^s_{a_s(J, r-1)}) & Gr^{W^K}_{a_K(J, r)}, as a subquotient of L."""
    WK = orbit.w_multi(K)
    aK = a_index(K, J, r)
    den = WK.level(aK - 1)
    core = [orbit.w_multi(s).level(a_index(s, J, r - 1)) for s in chain if s != K]
    core.append(WK.level(aK))
    return Subquotient(span(intersect(*core), den), den)


def c_complex(orbit, K, M, r):
    """C^{KM}_r L over M+ x S_K(M); K = M gives C^K_r L."""
    K, M = _check_KM(orbit, K, M)
    chains = chains_through(M, K)
    eye = LinMap.identity(orbit.dim).matrix
    terms, edges = [], []
    for J in subsets(M, nonempty=False):
        for s in chains:
            terms.append(((J, s), len(J) + len(M) - len(s), c_term(orbit, K, J, s, r)))
            edges.extend(koszul_edges(orbit, J, s, M))
            for t, e in deletions(s):
                if K in t:
                    edges.append(((J, s), (J, t), (-1) ** len(J) * e, eye))
    return assemble(terms, edges)


### elementary complexes

def _as_m(m):
    """{i: m_i} from a dict or a sequence indexed by 1..n."""
    if isinstance(m, dict):
        return dict(sorted((int(i), int(v)) for i, v in m.items()))
    return {i: int(v) for i, v in enumerate(m, start=1)}


def elementary_term(orbit, m, J, realization=iterated_graded):
    K = tuple(m)
    ws = [orbit.w_multi((i,)) for i in K]
    return realization(ws, [m[i] - 2 * (i in J) for i in K])


def elementary(orbit, m, realization=iterated_graded):
    """K(m.): generators J <= K, term Gr_{m - 2[J]}, edges N_i with the Koszul sign."""
    m = _as_m(m)
    K = tuple(m)
    terms = [((J, ()), len(J), elementary_term(orbit, m, J, realization)) for J in subsets(K, nonempty=False)]
    edges = [e for J in subsets(K, nonempty=False) for e in koszul_edges(orbit, J, (), K)]
    return assemble(terms, edges)


def elementary_cohomology_expected(orbit, m):
    """(degree, dim): acyclic if some m_i = 1, else degree |J(m)| with J(m) = {i : m_i > 1}."""
    m = _as_m(m)
    K = tuple(m)
    if any(v == 1 for v in m.values()):
        return None, 0
    Jm = tuple(i for i in K if m[i] > 1)
    n = orbit.dim
    S = span(zero_space(n), *[image(orbit.nilpotent(j)) for j in Jm])
    rest = [preimage(orbit.nilpotent(i), S) for i in K if i not in Jm]
    num = intersect(*rest) if rest else full_space(n)
    start = Subquotient(num, S)
    ws = [orbit.w_multi((i,)) for i in K]
    d = iterated_graded(ws, [m[i] - 2 * (i in Jm) for i in K], start=start).dim
    return (len(Jm), d) if d else (None, 0)


def elementary_check(orbit, m):
    prof = elementary(orbit, m).profile()
    expected = elementary_cohomology_expected(orbit, m)
    got = prof.concentrated()
    return CheckRecord('elementary.profile', {'m': tuple(_as_m(m).values())}, got == expected,
                       {'profile': prof.to_dict(), 'expected': expected})


def support_box(orbit, K):
    """Per i in K, the m_i for which some elementary term can be nonzero."""
    ranges = []
    for i in K:
        jumps = orbit.w_multi((i,)).jumps() or [0]
        ranges.append(range(min(jumps), max(jumps) + 3))
    return ranges


def in_X(chain, K, m, r):
    """m in X(s., r): sum_K m = |K| + r and sum_{s} m <= |s| + r - 1 for s != K."""
    if sum(m[i] for i in K) != len(K) + r:
        return False
    return all(sum(m[i] for i in s) <= len(s) + r - 1 for s in chain if s != K)


def combinatorial_elementary(orbit, K, m, r):
    """K~(m.; r): generators (J, s.) with s. in S(K) and m in X(s., r)."""
    K = as_set(K)
    m = _as_m(m)
    if tuple(m) != K:
        raise InputError(f'm must be indexed by K = {K}')
    chains = [s for s in enumerate_chains(K) if in_X(s, K, m, r)]
    eye = LinMap.identity(orbit.dim).matrix
    terms, edges = [], []
    for J in subsets(K, nonempty=False):
        sq = elementary_term(orbit, m, J)
        for s in chains:
            terms.append(((J, s), len(J) + len(K) - len(s), sq))
            edges.extend(koszul_edges(orbit, J, s, K))
            for t, e in deletions(s):
                assert in_X(t, K, m, r), 'deleting a chain element cannot leave X(s., r)'
                edges.append(((J, s), (J, t), (-1) ** len(J) * e, eye))
    return assemble(terms, edges)


def _m_vectors(orbit, K, r):
    K = as_set(K)
    for values in product(*support_box(orbit, K)):
        if sum(values) == len(K) + r:
            yield dict(zip(K, values))


def elementary_decomposition_check(orbit, K, r):
    """Chain and cohomology dims of C^K_r equal the sums over m in X(r) of those of K~(m.; r)."""
    K = as_set(K)
    C = c_complex(orbit, K, K, r)
    chain_sum, prof_sum = defaultdict(int), CohomologyProfile()
    for m in _m_vectors(orbit, K, r):
        cx = combinatorial_elementary(orbit, K, m, r)
        for d, v in cx.chain_dims().items():
            chain_sum[d] += v
        prof_sum = prof_sum + cx.profile()
    lhs_chain, lhs_prof = C.chain_dims(), C.profile()
    ok = lhs_chain == dict(chain_sum) and lhs_prof == prof_sum
    return CheckRecord('elementary.decomposition', {'K': K, 'r': r}, ok,
                       {'chain': lhs_chain, 'chain_sum': dict(chain_sum),
                        'profile': lhs_prof.to_dict(), 'profile_sum': prof_sum.to_dict()})


def basic_lemma_check(orbit, K, r):
    """K~(m.; r) is acyclic when r >= 0 and some m_i < 2, or r <= 0 and some m_i >= 2."""
    K = as_set(K)
    bad, checked = [], 0
    for m in _m_vectors(orbit, K, r):
        low, high = any(v < 2 for v in m.values()), any(v >= 2 for v in m.values())
        if (r >= 0 and low) or (r <= 0 and high):
            checked += 1
            prof = combinatorial_elementary(orbit, K, m, r).profile()
            if not prof.is_acyclic():
                bad.append({'m': tuple(m.values()), 'profile': prof.to_dict()})
    return CheckRecord('elementary.basic_lemma', {'K': K, 'r': r}, not bad,
                       {'checked': checked, 'violations': bad})


### T(r) embeddings and purity

def t_sets(K, r):
    """T(r) = {m : sum m = |K|+r, m_i >= 2} for r > 0; T'(r) = {m : sum m = |K|+r, m_i <= 0} for r < 0."""
    K = as_set(K)
    if r == 0:
        raise InputError('T(0) is empty by definition; r must be nonzero')
    total, k = len(K) + r, len(K)
    if r > 0:
        ranges = [range(2, total - 2 * (k - 1) + 1)] * k
        kind = 'T'
    else:
        ranges = [range(total, 1)] * k
        kind = "T'"
    return kind, [dict(zip(K, v)) for v in product(*ranges) if sum(v) == total]


def embed_t_complex(orbit, K, r):
    """The chain map C(T(r)) -> C^K_r (diagonal into maximal chains with the removal sign),
    or C(T'(r))[1-|K|] -> C^K_r into the chain (K)."""
    K = as_set(K)
    kind, ms = t_sets(K, r)
    target = c_complex(orbit, K, K, r)
    eye = LinMap.identity(orbit.dim).matrix
    offset = 0 if r > 0 else len(K) - 1
    terms, edges, map_edges = [], [], []
    maximal = [s for s in enumerate_chains(K) if is_maximal(s)]
    for m in ms:
        tag = tuple(m.values())
        for J in subsets(K, nonempty=False):
            terms.append(((J, tag), len(J) + offset, elementary_term(orbit, m, J, joint_graded)))
            edges.extend(koszul_edges(orbit, J, tag, K))
            if r > 0:
                map_edges.extend(((J, tag), (J, s), removal_sign(s), eye) for s in maximal)
            else:
                map_edges.append(((J, tag), (J, (K,)), 1, eye))
    source = assemble(terms, edges)
    return source, target, assemble_map(source, target, map_edges)


def t_embedding_check(orbit, K, r):
    K = as_set(K)
    try:
        source, target, F = embed_t_complex(orbit, K, r)
    except ContractError as e:
        return CheckRecord('purity.t_embedding', {'K': K, 'r': r}, False, {'error': str(e)})
    ok, details = F.is_quasi_isomorphism()
    return CheckRecord('purity.t_embedding', {'K': K, 'r': r}, ok, {'ranks': details})


def purity_formula(orbit, K, r):
    """(degree, dim) predicted for C^K_r: Gr^{W^K}_{r-|K|}(L / sum N_i L) in degree |K| for r > 0,
    Gr^{W^K}_{r+|K|}(& ker N_i) in degree |K|-1 for r < 0."""
    K = as_set(K)
    n = orbit.dim
    WK = orbit.w_multi(K)
    if r == 0:
        return None, 0
    if r > 0:
        S = span(zero_space(n), *[image(orbit.nilpotent(i)) for i in K])
        d = iterated_graded([WK], [r - len(K)], start=Subquotient(full_space(n), S)).dim
        return (len(K), d) if d else (None, 0)
    ker = intersect(*[kernel(orbit.nilpotent(i)) for i in K])
    d = iterated_graded([WK], [r + len(K)], start=Subquotient(ker, zero_space(n))).dim
    return (len(K) - 1, d) if d else (None, 0)


def purity_check(orbit, K, r):
    K = as_set(K)
    prof = c_complex(orbit, K, K, r).profile()
    expected = purity_formula(orbit, K, r)
    got = prof.concentrated()
    ok = got == expected
    if 0 < abs(r) < len(K) or r == 0:
        ok = ok and prof.is_acyclic()
    return CheckRecord('purity.concentration', {'K': K, 'r': r}, ok,
                       {'profile': prof.to_dict(), 'formula': expected})


def decomposition_check(orbit, r):
    """Gr_r Omega*L and the sum over K of C^{KM}_r L have the same cohomology dims."""
    lhs = graded_weight(orbit, r).profile()
    parts = {K: c_complex(orbit, K, orbit.indices, r).profile() for K in subsets(orbit.indices)}
    rhs = CohomologyProfile()
    for p in parts.values():
        rhs = rhs + p
    ok = lhs == rhs and (r != 0 or lhs.is_acyclic())
    return CheckRecord('decompose.graded', {'r': r}, ok,
                       {'graded': lhs.to_dict(), 'parts': {K: p.to_dict() for K, p in parts.items() if p.dims}})


### IC(L) and the fibre formulas

def ic_complex(orbit):
    """s(N_J L, N.): image of the product N_J at slot J."""
    n = orbit.dim
    terms = [((J, ()), len(J), Subquotient(image(orbit.n_product(J)), zero_space(n)))
             for J in subsets(orbit.indices, nonempty=False)]
    edges = [e for J in subsets(orbit.indices, nonempty=False) for e in koszul_edges(orbit, J, (), orbit.indices)]
    return assemble(terms, edges)


def kk_check(orbit):
    """H(W_{-1} Omega*L) = H(IC(L)) = H(W_0 Omega*L) degree by degree."""
    w_minus, w_zero = omega_weight(orbit, -1).profile(), omega_weight(orbit, 0).profile()
    ic = ic_complex(orbit).profile()
    return [
        CheckRecord('ic.kashiwara_kawai', {}, w_minus == ic, {'W_-1': w_minus.to_dict(), 'IC': ic.to_dict()}),
        CheckRecord('ic.gr0_acyclic', {}, w_minus == w_zero, {'W_-1': w_minus.to_dict(), 'W_0': w_zero.to_dict()}),
    ]


def residual_orbit(orbit, K, r):
    """The orbit on the concentrated cohomology H of C^K_r with the induced N_j, j outside K.

    Returns (orbit or None, degree) where None means C^K_r is acyclic.
    """
    K = as_set(K)
    C = c_complex(orbit, K, K, r)
    deg, dim = C.profile().concentrated() or (None, None)
    if dim is None:
        raise ContractError(f'C^K_r is not concentrated for K={K}, r={r}')
    if deg is None:
        return None, None
    H = Subquotient(C.cocycles(deg), C.coboundaries(deg))
    rest = [j for j in orbit.indices if j not in K]
    nilpotents = []
    for j in rest:
        Nj = orbit.nilpotent(j).matrix
        F = assemble_map(C, C, [(label, label, 1, Nj) for label in C.index])
        nilpotents.append(LinMap(induced_block(F.matrix(deg), H, H)))
    return NilpotentOrbit(H.dim, tuple(nilpotents), labels=tuple(orbit.labels[j - 1] for j in rest)), deg


def w_minus1_fiber_check(orbit, K, r):
    """C^{KM}_r L has the cohomology of W_{-1} Omega*(H), shifted by the concentration degree of C^K_r."""
    K = as_set(K)
    M = orbit.indices
    if K == M or r == 0:
        raise InputError('need K strictly inside M and r != 0')
    lhs = c_complex(orbit, K, M, r).profile()
    try:
        H, deg = residual_orbit(orbit, K, r)
    except ContractError as e:
        return CheckRecord('ic.w_minus1_fiber', {'K': K, 'r': r}, False, {'error': str(e)})
    if H is None:
        rhs = CohomologyProfile()
    else:
        rhs = omega_weight(H, -1).profile().shifted(deg)
    return CheckRecord('ic.w_minus1_fiber', {'K': K, 'r': r}, lhs == rhs,
                       {'c_KM': lhs.to_dict(), 'residual': rhs.to_dict(), 'dim_H': H.dim if H else 0})


### Hodge numbers

def _hodge_numbers(cx, k, f_level, ps):
    """{(p, k, d): dim Gr_F^p H^d(cx)} with F^p at a label given by f_level(label, p)."""
    table = {}
    for d in cx.degrees():
        Z, B = cx.cocycles(d), cx.coboundaries(d)
        if Z.rank == B.rank:
            continue
        f_dims = []
        for p in ps:
            Fp = cx.embed(d, {label: f_level(label, p) for label in cx.labels(d)})
            f_dims.append(span(intersect(Fp, Z), B).rank - B.rank)
        f_dims.append(0)
        for p, hi, lo in zip(ps, f_dims, f_dims[1:]):
            if hi - lo:
                table[(p, k, d)] = hi - lo
    return table


def _hodge_range(orbit):
    jumps = orbit.hodge.jumps() or [0]
    return list(range(min(jumps), max(jumps) + orbit.n + 2))


def hodge_table(orbit, k):
    """h^{p,k}_d = dim Gr_F^p H^d(Gr_k Omega*L), F on cohomology induced by F^p & W_k."""
    if orbit.hodge is None:
        raise InputError('orbit has no Hodge filtration')
    model = omega_model(orbit)

    def f_level(label, p):
        J, s = label
        return intersect(model.hodge_space(J, p), model.weight_space(J, s, k))

    return _hodge_numbers(graded_weight(orbit, k), k, f_level, _hodge_range(orbit))


def hodge_check(orbit, k):
    table = hodge_table(orbit, k)
    prof = graded_weight(orbit, k).profile()
    sums = defaultdict(int)
    for (p, _, d), h in table.items():
        sums[d] += h
    ok = dict(sums) == prof.dims
    return CheckRecord('hodge.table', {'k': k}, ok,
                       {'h': {f'{p},{d}': h for (p, _, d), h in sorted(table.items())}, 'profile': prof.to_dict()})


def mhc_shift(table, m, h):
    """Reindex (p, k, d) under (K[m], W[m-2h], F[h])."""
    return {(p - h, k + m - 2 * h, d - m): v for (p, k, d), v in table.items()}


def _table_strings(table):
    return {f'{p},{k},{d}': v for (p, k, d), v in sorted(table.items())}


def mhc_shift_check(orbit, k, m, h):
    """Hodge numbers of Gr_{k+m-2h} of (Omega*L[m], W[m-2h], F[h]), assembled as its own complex,
    against mhc_shift of the table of Gr_k."""
    expected = mhc_shift(hodge_table(orbit, k), m, h)
    model = omega_model(orbit)
    terms = [(label, deg - m, sq) for label, deg, sq in
             _omega_terms(orbit, lambda md, J, s: Subquotient(md.weight_space(J, s, k), md.weight_space(J, s, k - 1)))]
    edges = [(src, dst, (-1) ** (m % 2) * c, f) for src, dst, c, f in model.edges()]
    shifted = assemble(terms, edges)

    def f_level(label, p):
        J, s = label
        return intersect(model.hodge_space(J, p + h), model.weight_space(J, s, k))

    direct = _hodge_numbers(shifted, k + m - 2 * h, f_level, [p - h for p in _hodge_range(orbit)])
    return CheckRecord('hodge.mhc_shift', {'k': k, 'm': m, 'h': h}, direct == expected,
                       {'direct': _table_strings(direct), 'expected': _table_strings(expected)})
