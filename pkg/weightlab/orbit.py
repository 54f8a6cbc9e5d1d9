"""
Nilpotent orbits (L, N_i, F, P, m): the data model, its validation, the
monodromy logarithm and the generators used as the test corpus.
"""
from dataclasses import dataclass, field
from itertools import product
from math import factorial, prod
from typing import Optional

import numpy as np
from sympy import QQ
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from .constants import DEFAULT_SEED
from .errors import InputError, ContractError
from .qlinalg import LinMap, IncFiltration, canonicalize, commutator, full_space, transport, dm
from .util.misc import CheckRecord
from .weightcore import nilpotency_index, weight_filtration


@dataclass
class NilpotentOrbit:
    """Commuting nilpotents N_1..N_n on Q^dim, indexed by M = {1..n}.

    `hodge` is a decreasing filtration, `pairing` the Gram matrix P with
    P(x, y) = x^T P y.
    """
    dim: int
    nilpotents: tuple
    weight: int = 0
    hodge: Optional[IncFiltration] = None
    pairing: Optional[LinMap] = None
    labels: Optional[tuple] = None
    multiplicities: Optional[tuple] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self.nilpotents = tuple(self.nilpotents)
        for i, N in enumerate(self.nilpotents, start=1):
            if N.matrix.shape != (self.dim, self.dim):
                raise InputError(f'nilpotent {i} has shape {N.matrix.shape}, expected {(self.dim, self.dim)}')
        if self.labels is None:
            self.labels = tuple(f'N{i}' for i in self.indices)
        self.labels = tuple(self.labels)
        if len(self.labels) != self.n:
            raise InputError(f'{len(self.labels)} labels for {self.n} nilpotents')
        if self.multiplicities is not None:
            self.multiplicities = tuple(int(x) for x in self.multiplicities)
            if len(self.multiplicities) != self.n or min(self.multiplicities, default=1) < 1:
                raise InputError(f'multiplicities must be {self.n} positive integers')
        if self.hodge is not None and (self.hodge.ambient_dim != self.dim or not self.hodge.decreasing):
            raise InputError('hodge filtration must be decreasing on the orbit space')
        if self.pairing is not None and self.pairing.matrix.shape != (self.dim, self.dim):
            raise InputError('pairing matrix has the wrong shape')

    @property
    def n(self):
        return len(self.nilpotents)

    @property
    def indices(self):
        return tuple(range(1, self.n + 1))

    def nilpotent(self, i):
        if i not in self.indices:
            raise InputError(f'no nilpotent with index {i}')
        return self.nilpotents[i - 1]

    def n_sum(self, J):
        N = LinMap.zero(self.dim, self.dim)
        for j in J:
            N = N + self.nilpotent(j)
        return N

    def n_product(self, J):
        N = LinMap.identity(self.dim)
        for j in J:
            N = self.nilpotent(j).compose(N)
        return N

    def memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def w_multi(self, J):
        """W^J = W(sum_{j in J} N_j), cached per sorted subset."""
        J = tuple(sorted(set(J)))
        if not J:
            raise InputError('W^J needs a nonempty subset J')
        for j in J:
            if j not in self.indices:
                raise InputError(f'index {j} is not in the orbit')
        return self.memo(('W', J), lambda: weight_filtration(self.n_sum(J)))

    def w_or_trivial(self, J):
        """W^J, with W^{empty} the trivial filtration (W_{-1} = 0, W_0 = L)."""
        if not tuple(J):
            return IncFiltration.trivial(self.dim)
        return self.w_multi(J)

    def get_multiplicities(self, multiplicities=None):
        if multiplicities is None:
            multiplicities = self.multiplicities or (1,) * self.n
        multiplicities = tuple(int(x) for x in multiplicities)
        if len(multiplicities) != self.n or min(multiplicities, default=1) < 1:
            raise InputError(f'multiplicities must be {self.n} positive integers, got {multiplicities}')
        return multiplicities


def validate(orbit):
    """Pass/fail records for commutativity, nilpotency, transversality and the pairing."""
    records = []
    bad_pairs = []
    for i in orbit.indices:
        for j in orbit.indices:
            if i < j and not commutator(orbit.nilpotent(i), orbit.nilpotent(j)).is_zero():
                bad_pairs.append((i, j))
    records.append(CheckRecord('validate.commutativity', {}, not bad_pairs, {'noncommuting': bad_pairs}))

    bad = []
    for i in orbit.indices:
        try:
            nilpotency_index(orbit.nilpotent(i))
        except ContractError:
            bad.append(i)
    records.append(CheckRecord('validate.nilpotency', {}, not bad, {'not_nilpotent': bad}))

    if orbit.hodge is not None:
        F = orbit.hodge
        jumps = F.jumps() or [0]
        bad = []
        for i in orbit.indices:
            N = orbit.nilpotent(i)
            for p in range(min(jumps) - 1, max(jumps) + 2):
                if not F.level(p - 1).contains(N.push(F.level(p))):
                    bad.append({'i': i, 'p': p})
        records.append(CheckRecord('validate.transversality', {}, not bad, {'violations': bad}))

    if orbit.pairing is not None:
        P = orbit.pairing.matrix
        bad = []
        for i in orbit.indices:
            N = orbit.nilpotent(i).matrix
            if (N.transpose() * P + P * N).to_dod():
                bad.append(i)
        records.append(CheckRecord('validate.pairing', {}, not bad, {'not_isometric': bad}))
    return records


def exp_nilpotent(N):
    """exp(N); the series terminates."""
    nu = nilpotency_index(N)
    total = LinMap.zero(N.domain_dim, N.domain_dim)
    term = LinMap.identity(N.domain_dim)
    for k in range(max(nu, 1)):
        total = total + term.scale(QQ(1, factorial(k)))
        term = N.compose(term)
    return total


def monodromy_log(T):
    """N = Log T = -sum_{k>=1} (I - T)^k / k for unipotent T."""
    n = T.domain_dim
    X = LinMap.identity(n) - T
    try:
        nu = nilpotency_index(X)
    except ContractError:
        raise ContractError('monodromy is not unipotent: I - T is not nilpotent')
    N = LinMap.zero(n, n)
    term = X
    for k in range(1, nu):
        N = N - term.scale(QQ(1, k))
        term = X.compose(term)
    if exp_nilpotent(N) != T:
        raise ContractError('exp(Log T) != T')
    return N


### Generators

def _block_data(sizes):
    """Offsets and per-vector (block size, position) for a Jordan decomposition."""
    for s in sizes:
        if int(s) < 1:
            raise InputError(f'block sizes must be >= 1, got {sizes}')
    layout = []
    for s in sizes:
        layout.extend((int(s), j) for j in range(int(s)))
    return layout


def _hodge_from_levels(dim, levels):
    """Decreasing filtration with F^p spanned by the basis vectors of level >= p."""
    if dim == 0:
        return IncFiltration(0, {}, decreasing=True)
    steps = {}
    for p in range(0, max(levels) + 1):
        vectors = [[1 if t == idx else 0 for t in range(dim)] for idx, lvl in enumerate(levels) if lvl >= p]
        steps[p] = canonicalize(vectors, dim)
    return IncFiltration(dim, steps, decreasing=True)


def gen_jordan(sizes):
    """One nilpotent in Jordan form: N e_j = e_{j-1} inside each block."""
    layout = _block_data(sizes)
    dim = len(layout)
    N, P = {}, {}
    offset = 0
    for s in sizes:
        s = int(s)
        for j in range(1, s):
            N.setdefault(offset + j - 1, {})[offset + j] = QQ(1)
        for j in range(s):
            P.setdefault(offset + j, {})[offset + s - 1 - j] = QQ((-1) ** j)
        offset += s
    hodge = _hodge_from_levels(dim, [j for _, j in layout])
    return NilpotentOrbit(dim, (LinMap(dm(N, (dim, dim))),), weight=max(sizes) - 1,
                          hodge=hodge, pairing=LinMap(dm(P, (dim, dim))))


def gen_sl2_tensor(sizes):
    """L = V_{s_1} x ... x V_{s_n} with N_i the Jordan block on factor i.

    F^p is spanned by the tensor basis vectors e_t with |t| >= p and P is the
    product of the standard sl2-invariant forms.
    """
    sizes = [int(s) for s in sizes]
    if not sizes or min(sizes) < 1:
        raise InputError(f'factor sizes must be >= 1, got {sizes}')
    basis = list(product(*[range(s) for s in sizes]))
    index = {t: k for k, t in enumerate(basis)}
    dim = len(basis)
    nilpotents = []
    for i in range(len(sizes)):
        N = {}
        for t in basis:
            if t[i] >= 1:
                lower = t[:i] + (t[i] - 1,) + t[i + 1:]
                N.setdefault(index[lower], {})[index[t]] = QQ(1)
        nilpotents.append(LinMap(dm(N, (dim, dim))))
    P = {}
    for t in basis:
        dual = tuple(s - 1 - ti for s, ti in zip(sizes, t))
        P.setdefault(index[t], {})[index[dual]] = QQ(prod((-1) ** ti for ti in t))
    hodge = _hodge_from_levels(dim, [sum(t) for t in basis])
    return NilpotentOrbit(dim, tuple(nilpotents), weight=sum(s - 1 for s in sizes),
                          hodge=hodge, pairing=LinMap(dm(P, (dim, dim))))


def random_unimodular(dim, rng):
    """Lower unitriangular times upper unitriangular with small integer entries."""
    lower, upper = {}, {}
    for i in range(dim):
        lower.setdefault(i, {})[i] = QQ(1)
        upper.setdefault(i, {})[i] = QQ(1)
        for j in range(dim):
            x = int(rng.integers(-2, 3))
            if x and j < i:
                lower[i][j] = QQ(x)
            elif x and j > i:
                upper[i][j] = QQ(x)
    return LinMap(dm(lower, (dim, dim)) * dm(upper, (dim, dim)))


def gen_conjugated(orbit, g=None, seed=DEFAULT_SEED):
    """The same orbit in the basis g: N -> g N g^-1, F -> gF, P -> g^-T P g^-1."""
    if g is None:
        g = random_unimodular(orbit.dim, np.random.default_rng(seed))
    if g.matrix.shape != (orbit.dim, orbit.dim):
        raise InputError('conjugating matrix has the wrong shape')
    if orbit.dim == 0:
        return orbit
    try:
        g_inv = LinMap(g.matrix.inv())
    except DMNonInvertibleMatrixError:
        raise InputError('conjugating matrix is not invertible')
    nilpotents = tuple(g.compose(N).compose(g_inv) for N in orbit.nilpotents)
    hodge = transport(orbit.hodge, g) if orbit.hodge is not None else None
    pairing = None
    if orbit.pairing is not None:
        pairing = LinMap(g_inv.matrix.transpose() * orbit.pairing.matrix * g_inv.matrix)
    return NilpotentOrbit(orbit.dim, nilpotents, weight=orbit.weight, hodge=hodge, pairing=pairing,
                          labels=orbit.labels, multiplicities=orbit.multiplicities)


def zero_orbit(dim=1, n=1):
    """All nilpotents zero; F trivial at 0."""
    hodge = IncFiltration(dim, {0: full_space(dim)}, decreasing=True) if dim else None
    return NilpotentOrbit(dim, tuple(LinMap.zero(dim, dim) for _ in range(n)), hodge=hodge)
