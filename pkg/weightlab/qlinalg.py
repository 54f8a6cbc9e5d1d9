"""
Exact linear algebra over the rationals.

Vectors are rows. A Subspace is stored as the nonzero rows of its reduced
row echelon form, which makes equality of subspaces structural. A LinMap
holds a codomain x domain matrix acting on column vectors. Everything is
backed by sympy's sparse DomainMatrix over QQ.
"""
from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import InputError, ContractError


def to_qq(x):
    """Parse an int, Fraction, QQ element or a string like '-3/4' into QQ."""
    if isinstance(x, bool):
        raise InputError(f'not a rational: {x!r}')
    if isinstance(x, str):
        try:
            f = Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f'malformed rational string: {x!r}')
        if '.' in x or 'e' in x.lower():
            raise InputError(f'decimal notation not accepted, use p/q: {x!r}')
        return QQ(f.numerator, f.denominator)
    if isinstance(x, float):
        raise InputError(f'floating point entries are not accepted: {x!r}')
    if hasattr(x, 'numerator') and hasattr(x, 'denominator'):
        return QQ(int(x.numerator), int(x.denominator))
    raise InputError(f'not a rational: {x!r}')


def qq_str(a):
    n, d = int(a.numerator), int(a.denominator)
    return str(n) if d == 1 else f'{n}/{d}'


def dm(dod, shape):
    return DomainMatrix.from_dod(dod, shape, QQ)


def dm_zeros(shape):
    return DomainMatrix.from_dod({}, shape, QQ)


def dm_from_rows(rows, ncols):
    """Dense list of rows (any rational-like entries) to a sparse DomainMatrix."""
    dod = {}
    for i, row in enumerate(rows):
        if len(row) != ncols:
            raise InputError(f'row {i} has length {len(row)}, expected {ncols}')
        entries = {}
        for j, x in enumerate(row):
            q = to_qq(x)
            if q:
                entries[j] = q
        if entries:
            dod[i] = entries
    return dm(dod, (len(rows), ncols))


def dm_to_rows(A):
    """Sparse DomainMatrix to a dense list of lists of QQ."""
    m, n = A.shape
    out = [[QQ(0)] * n for _ in range(m)]
    for i, row in A.to_dod().items():
        for j, v in row.items():
            out[i][j] = v
    return out


def dm_is_zero(A):
    return not A.to_dod()


def rref_rows(A):
    """Nonzero rows of rref(A) as a tuple of sorted (col, value) tuples, plus pivots."""
    m, n = A.shape
    if m == 0 or n == 0 or not A.to_dod():
        return (), ()
    R, pivots = A.rref()
    dod = R.to_dod()
    rows = tuple(tuple(sorted(dod[i].items())) for i in sorted(dod))
    assert len(rows) == len(pivots), 'rref rows and pivots disagree'
    return rows, tuple(pivots)


def matrix_rank(A):
    return len(rref_rows(A)[1])


class Subspace(object):
    """Span of a set of rational vectors, kept in canonical (rref) form."""
    __slots__ = ('ambient_dim', 'rows', 'pivots', '_matrix', '_annihilator')

    def __init__(self, ambient_dim, rows=(), pivots=()):
        self.ambient_dim = ambient_dim
        self.rows = rows
        self.pivots = pivots
        self._matrix = None
        self._annihilator = None

    @classmethod
    def from_matrix(cls, A):
        rows, pivots = rref_rows(A)
        return cls(A.shape[1], rows, pivots)

    @property
    def rank(self):
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    def matrix(self):
        """Basis as a rank x ambient_dim DomainMatrix."""
        if self._matrix is None:
            dod = {i: dict(row) for i, row in enumerate(self.rows)}
            self._matrix = dm(dod, (self.rank, self.ambient_dim))
        return self._matrix

    def annihilator(self):
        """Rows spanning the linear forms vanishing on this subspace ((n - rank) x n)."""
        if self._annihilator is None:
            n = self.ambient_dim
            if self.rank == 0:
                self._annihilator = DomainMatrix.eye(n, QQ).to_sparse()
            elif self.rank == n:
                self._annihilator = dm_zeros((0, n))
            else:
                self._annihilator = self.matrix().nullspace_from_rref(list(self.pivots))
        return self._annihilator

    def is_zero(self):
        return self.rank == 0

    def is_full(self):
        return self.rank == self.ambient_dim

    def contains(self, other):
        """True iff `other` (a Subspace) lies inside this one."""
        _check_ambient(self, other)
        if other.rank == 0 or self.rank == self.ambient_dim:
            return True
        if other.rank > self.rank:
            return False
        return dm_is_zero(self.annihilator() * other.matrix().transpose())

    def contains_matrix_rows(self, B):
        """True iff every row of the DomainMatrix B lies in this subspace."""
        if B.shape[0] == 0 or self.rank == self.ambient_dim:
            return True
        return dm_is_zero(self.annihilator() * B.transpose())

    def vectors(self):
        return dm_to_rows(self.matrix())

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.rows == other.rows

    def __hash__(self):
        return hash((self.ambient_dim, self.rows))

    def __repr__(self):
        vecs = [[qq_str(x) for x in v] for v in self.vectors()]
        return f'Subspace(dim={self.rank}/{self.ambient_dim}, basis={vecs})'


def _check_ambient(a, b):
    if a.ambient_dim != b.ambient_dim:
        raise InputError(f'ambient mismatch: {a.ambient_dim} vs {b.ambient_dim}')


def zero_space(n):
    return Subspace(n)


def full_space(n):
    if n == 0:
        return Subspace(0)
    return Subspace.from_matrix(DomainMatrix.eye(n, QQ).to_sparse())


def canonicalize(vectors, ambient_dim):
    """Span of `vectors` (dense sequences or a DomainMatrix of rows) in canonical form."""
    if isinstance(vectors, DomainMatrix):
        if vectors.shape[1] != ambient_dim:
            raise InputError(f'vectors have length {vectors.shape[1]}, expected {ambient_dim}')
        return Subspace.from_matrix(vectors)
    vectors = list(vectors)
    for v in vectors:
        if len(v) != ambient_dim:
            raise InputError(f'vector of length {len(v)} in ambient dimension {ambient_dim}')
    if not vectors:
        return zero_space(ambient_dim)
    return Subspace.from_matrix(dm_from_rows(vectors, ambient_dim))


def span(*spaces):
    """Sum of subspaces."""
    assert spaces, 'span of nothing'
    n = spaces[0].ambient_dim
    nonzero = []
    for s in spaces:
        _check_ambient(spaces[0], s)
        if s.rank == n:
            return s
        if s.rank:
            nonzero.append(s)
    if not nonzero:
        return zero_space(n)
    if len(nonzero) == 1:
        return nonzero[0]
    return Subspace.from_matrix(nonzero[0].matrix().vstack(*[s.matrix() for s in nonzero[1:]]))


def intersect(*spaces):
    """Intersection of subspaces, computed as the common kernel of their annihilators."""
    assert spaces, 'intersection of nothing'
    n = spaces[0].ambient_dim
    proper = []
    for s in spaces:
        _check_ambient(spaces[0], s)
        if s.rank == 0:
            return zero_space(n)
        if s.rank < n:
            proper.append(s)
    if not proper:
        return spaces[0]
    if len(proper) == 1:
        return proper[0]
    forms = proper[0].annihilator().vstack(*[s.annihilator() for s in proper[1:]])
    return kernel_of_matrix(forms)


def kernel_of_matrix(A):
    m, n = A.shape
    if m == 0 or not A.to_dod():
        return full_space(n)
    R, pivots = A.rref()
    if len(pivots) == n:
        return zero_space(n)
    null = R.nullspace_from_rref(list(pivots))
    return Subspace.from_matrix(null)


def image_of_matrix(A):
    return Subspace.from_matrix(A.transpose())


class LinMap(object):
    """A linear map Q^domain_dim -> Q^codomain_dim; `matrix` is codomain x domain."""
    __slots__ = ('matrix',)

    def __init__(self, matrix):
        self.matrix = matrix

    @classmethod
    def from_rows(cls, rows, domain_dim=None):
        """Matrix given row by row (row i = coordinates of the i-th output)."""
        rows = [list(r) for r in rows]
        if domain_dim is None:
            domain_dim = len(rows[0]) if rows else 0
        return cls(dm_from_rows(rows, domain_dim))

    @classmethod
    def identity(cls, n):
        if n == 0:
            return cls(dm_zeros((0, 0)))
        return cls(DomainMatrix.eye(n, QQ).to_sparse())

    @classmethod
    def zero(cls, codomain_dim, domain_dim):
        return cls(dm_zeros((codomain_dim, domain_dim)))

    @property
    def domain_dim(self):
        return self.matrix.shape[1]

    @property
    def codomain_dim(self):
        return self.matrix.shape[0]

    def compose(self, other):
        """self after other."""
        if self.domain_dim != other.codomain_dim:
            raise InputError(f'cannot compose {self.matrix.shape} after {other.matrix.shape}')
        return LinMap(self.matrix * other.matrix)

    def __add__(self, other):
        return LinMap(self.matrix + other.matrix)

    def __sub__(self, other):
        return LinMap(self.matrix - other.matrix)

    def scale(self, c):
        c = to_qq(c) if not isinstance(c, type(QQ(0))) else c
        if not c:
            return LinMap.zero(self.codomain_dim, self.domain_dim)
        return LinMap(self.matrix * c)

    def power(self, k):
        assert k >= 0
        result = LinMap.identity(self.domain_dim)
        for _ in range(k):
            result = self.compose(result)
        return result

    def is_zero(self):
        return dm_is_zero(self.matrix)

    def apply_rows(self, B):
        """Images of the rows of B (k x domain) as rows (k x codomain)."""
        if B.shape[0] == 0:
            return dm_zeros((0, self.codomain_dim))
        return B * self.matrix.transpose()

    def push(self, s):
        """Image f(s) of a subspace."""
        if s.ambient_dim != self.domain_dim:
            raise InputError('subspace is not in the domain')
        if s.rank == 0:
            return zero_space(self.codomain_dim)
        return Subspace.from_matrix(self.apply_rows(s.matrix()))

    def rows(self):
        return dm_to_rows(self.matrix)

    def __eq__(self, other):
        if not isinstance(other, LinMap):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and self.matrix.to_dod() == other.matrix.to_dod()

    def __hash__(self):
        return hash(self.matrix.shape)

    def __repr__(self):
        return f'LinMap({[[qq_str(x) for x in r] for r in self.rows()]})'


def commutator(f, g):
    return f.compose(g) - g.compose(f)


def kernel(f):
    """Kernel of f; rank-nullity is asserted."""
    m, n = f.matrix.shape
    rows, pivots = rref_rows(f.matrix)
    if not pivots:
        return full_space(n)
    R = dm({i: dict(r) for i, r in enumerate(rows)}, (len(rows), n))
    if len(pivots) == n:
        ker = zero_space(n)
    else:
        ker = Subspace.from_matrix(R.nullspace_from_rref(list(pivots)))
    assert ker.rank + len(pivots) == n, 'rank-nullity violated'
    return ker


def image(f):
    return image_of_matrix(f.matrix)


def preimage(f, s):
    """{x : f(x) in s}."""
    if s.ambient_dim != f.codomain_dim:
        raise InputError(f'subspace of dim {s.ambient_dim} is not in the codomain ({f.codomain_dim})')
    if s.is_full():
        return full_space(f.domain_dim)
    forms = s.annihilator() * f.matrix
    return kernel_of_matrix(forms)


class Subquotient(object):
    """numerator / denominator with chosen quotient coordinates.

    `lift` is a basis (rows) of a complement of the denominator inside the
    numerator and `coords` is the coordinate matrix (dim x ambient) that is
    the identity on `lift` and kills the denominator.
    """
    __slots__ = ('numerator', 'denominator', '_lift', '_lift_pivots', '_coords')

    def __init__(self, numerator, denominator):
        _check_ambient(numerator, denominator)
        if not numerator.contains(denominator):
            raise ContractError('subquotient denominator is not contained in its numerator')
        self.numerator = numerator
        self.denominator = denominator
        self._lift = None
        self._lift_pivots = None
        self._coords = None

    @property
    def ambient_dim(self):
        return self.numerator.ambient_dim

    @property
    def dim(self):
        return self.numerator.rank - self.denominator.rank

    def __eq__(self, other):
        if not isinstance(other, Subquotient):
            return NotImplemented
        return self.numerator == other.numerator and self.denominator == other.denominator

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def __repr__(self):
        return f'Subquotient(dim={self.dim}, num={self.numerator.rank}, den={self.denominator.rank})'

    def _build(self):
        n = self.ambient_dim
        den = self.denominator
        if self.dim == 0:
            self._lift, self._lift_pivots = dm_zeros((0, n)), ()
            self._coords = dm_zeros((0, n))
            return
        N = self.numerator.matrix()
        if den.rank:
            D = den.matrix()
            N_piv = N.extract(list(range(N.shape[0])), list(den.pivots))
            N = N - N_piv * D
        rows, pivots = rref_rows(N)
        assert len(rows) == self.dim, 'complement has the wrong dimension'
        self._lift = dm({i: dict(r) for i, r in enumerate(rows)}, (len(rows), n))
        self._lift_pivots = pivots
        coords = {}
        den_rows = [dict(r) for r in den.rows]
        for j, pc in enumerate(pivots):
            entries = {pc: QQ(1)}
            for i, pd in enumerate(den.pivots):
                v = den_rows[i].get(pc)
                if v:
                    entries[pd] = -v
            coords[j] = entries
        self._coords = dm(coords, (len(pivots), n))

    @property
    def lift(self):
        if self._lift is None:
            self._build()
        return self._lift

    @property
    def coords(self):
        if self._coords is None:
            self._build()
        return self._coords

    def lift_vectors(self, X):
        """Lift coordinate rows (k x dim) to ambient vectors (k x ambient_dim)."""
        if X.shape[0] == 0 or self.dim == 0:
            return dm_zeros((X.shape[0], self.ambient_dim))
        return X * self.lift

    def lift_subspace(self, s):
        """Preimage in the numerator of a subspace of the quotient coordinates."""
        if s.ambient_dim != self.dim:
            raise InputError('subspace is not in the quotient coordinates')
        if s.rank == 0:
            return self.denominator
        return span(self.denominator, Subspace.from_matrix(self.lift_vectors(s.matrix())))


def whole(n):
    return Subquotient(full_space(n), zero_space(n))


def induced_block(f_matrix, src, dst):
    """Matrix (dst.dim x src.dim) induced by f on the subquotients; compatibility checked."""
    n_src, n_dst = src.ambient_dim, dst.ambient_dim
    if f_matrix.shape != (n_dst, n_src):
        raise InputError(f'map of shape {f_matrix.shape} between ambients {n_src} -> {n_dst}')
    if src.numerator.rank:
        images = src.numerator.matrix() * f_matrix.transpose()
        if not dst.numerator.contains_matrix_rows(images):
            raise ContractError('induced map: f(src.numerator) is not inside dst.numerator')
    if src.denominator.rank:
        images = src.denominator.matrix() * f_matrix.transpose()
        if not dst.denominator.contains_matrix_rows(images):
            raise ContractError('induced map: f(src.denominator) is not inside dst.denominator')
    if src.dim == 0 or dst.dim == 0:
        return dm_zeros((dst.dim, src.dim))
    return dst.coords * f_matrix * src.lift.transpose()


def induced_map(f, src, dst):
    """The map src -> dst induced by f, in the quotient coordinates of both."""
    return LinMap(induced_block(f.matrix, src, dst))


class IncFiltration(object):
    """Finite filtration of Q^n stored sparsely by its jumps.

    Increasing (default): level(k) is the step at the largest recorded index
    <= k, zero below the lowest. Decreasing: level(p) is the step at the
    smallest recorded index >= p, zero above the highest.
    """
    __slots__ = ('ambient_dim', 'steps', 'decreasing')

    def __init__(self, ambient_dim, steps, decreasing=False):
        self.ambient_dim = ambient_dim
        self.decreasing = decreasing
        clean = {}
        prev = zero_space(ambient_dim)
        order = sorted(steps, reverse=decreasing)
        for k in order:
            s = steps[k]
            if s.ambient_dim != ambient_dim:
                raise InputError(f'filtration step {k} lives in dimension {s.ambient_dim}')
            if not s.contains(prev):
                raise ContractError(f'filtration is not monotone at index {k}')
            if s != prev:
                clean[k] = s
            prev = s
        if ambient_dim and not prev.is_full():
            raise ContractError('filtration does not exhaust the ambient space')
        self.steps = dict(sorted(clean.items()))

    @classmethod
    def trivial(cls, n, at=0, decreasing=False):
        """Single jump from 0 to everything at index `at`."""
        return cls(n, {at: full_space(n)} if n else {}, decreasing=decreasing)

    def level(self, k):
        if not self.steps:
            return zero_space(self.ambient_dim)
        if self.decreasing:
            cands = [j for j in self.steps if j >= k]
            return self.steps[min(cands)] if cands else zero_space(self.ambient_dim)
        cands = [j for j in self.steps if j <= k]
        return self.steps[max(cands)] if cands else zero_space(self.ambient_dim)

    def __getitem__(self, k):
        return self.level(k)

    def jumps(self):
        return sorted(self.steps)

    def radius(self):
        j = self.jumps()
        return max((abs(k) for k in j), default=0)

    def graded_dims(self):
        return {k: graded(self, k).dim for k in self.jumps()}

    def __eq__(self, other):
        if not isinstance(other, IncFiltration):
            return NotImplemented
        return (self.ambient_dim == other.ambient_dim and self.decreasing == other.decreasing
                and self.steps == other.steps)

    def __hash__(self):
        return hash((self.ambient_dim, self.decreasing, tuple(self.steps)))

    def __repr__(self):
        kind = 'dec' if self.decreasing else 'inc'
        return f'IncFiltration({kind}, n={self.ambient_dim}, ' + \
            ', '.join(f'{k}:{s.rank}' for k, s in self.steps.items()) + ')'


def graded(w, k):
    """Gr_k: W_k / W_{k-1} (increasing) or F^k / F^{k+1} (decreasing)."""
    if w.decreasing:
        return Subquotient(w.level(k), w.level(k + 1))
    return Subquotient(w.level(k), w.level(k - 1))


def shift(w, m):
    """(W[m])_r = W_{r-m}; for a decreasing filtration (F[m])^p = F^{p+m}."""
    if w.decreasing:
        return IncFiltration(w.ambient_dim, {k - m: s for k, s in w.steps.items()}, decreasing=True)
    return IncFiltration(w.ambient_dim, {k + m: s for k, s in w.steps.items()})


def transport(w, g):
    """Image filtration g.W for an invertible g."""
    return IncFiltration(w.ambient_dim, {k: g.push(s) for k, s in w.steps.items()},
                         decreasing=w.decreasing)


def _step_pair(w, k):
    if w.decreasing:
        return w.level(k), w.level(k + 1)
    return w.level(k), w.level(k - 1)


def iterated_graded(filtrations, indices, start=None, check=True):
    """Gr_{m_k} ... Gr_{m_1} collapsed to one Subquotient of the ambient space.

    The first filtration is applied first. Each step replaces (num, den) by
    ((F_m & num) + den, (F_{m-1} & num) + den). `start` defaults to the
    whole space. The dimension is compared with the stepwise computation
    in quotient coordinates; a mismatch raises ContractError.
    """
    if len(filtrations) != len(indices):
        raise InputError('one index per filtration is required')
    if not filtrations:
        return start
    n = filtrations[0].ambient_dim
    sq = start if start is not None else whole(n)
    num, den = sq.numerator, sq.denominator
    for w, k in zip(filtrations, indices):
        if w.ambient_dim != n:
            raise InputError('filtrations must share the ambient space')
        hi, lo = _step_pair(w, k)
        num, den = span(intersect(hi, num), den), span(intersect(lo, num), den)
        if num == den:
            break
    result = Subquotient(num, den)
    if check:
        expected = _stepwise_dim(filtrations, indices, sq)
        if expected != result.dim:
            raise ContractError(f'iterated graded dim {result.dim} != stepwise dim {expected}')
    return result


def _stepwise_dim(filtrations, indices, start):
    """Dimension of the tower computed by taking honest quotients one step at a time."""
    cur = start
    # induced filtration on the current quotient V: images of (F_k & num) in V's coordinates
    pending = list(zip(filtrations, indices))
    while pending:
        w, k = pending.pop(0)
        hi, lo = _step_pair(w, k)
        Q = cur.coords
        img_hi = _coords_image(Q, intersect(hi, cur.numerator))
        img_lo = _coords_image(Q, intersect(lo, cur.numerator))
        dim = img_hi.rank - img_lo.rank
        if not pending or dim == 0:
            return dim
        cur = Subquotient(cur.lift_subspace(img_hi), cur.lift_subspace(img_lo))
    return cur.dim


def _coords_image(Q, s):
    if s.rank == 0 or Q.shape[0] == 0:
        return zero_space(Q.shape[0])
    return Subspace.from_matrix(s.matrix() * Q.transpose())


def joint_graded(filtrations, indices):
    """Symmetric realization: num = & F^i_{m_i}, den = sum_j (F^j_{m_j - 1} & num)."""
    if len(filtrations) != len(indices):
        raise InputError('one index per filtration is required')
    n = filtrations[0].ambient_dim
    num = intersect(*[_step_pair(w, k)[0] for w, k in zip(filtrations, indices)])
    dens = [intersect(_step_pair(w, k)[1], num) for w, k in zip(filtrations, indices)]
    den = span(*dens) if dens else zero_space(n)
    return Subquotient(num, den)
