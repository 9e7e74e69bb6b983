"""Sparse numerics for SCC positivity, eigenvectors and the outer system.

All numerics are double precision. Dense fallbacks (rank, null vector, LU)
are refused above ``DENSE_CAP`` unknowns.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve_triangular

DENSE_CAP = 4096
EPS = 1e-10
RANK_TOL = 1e-9
MAX_ITER = 10**6
SOLVE_TOL = 1e-12

ZERO = "zero"
POSITIVE = "positive"


class LinalgError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SparseMatrix:
    """Square matrix given by rows of ``(column, weight)`` pairs."""

    n: int
    rows: tuple
    _csr: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise LinalgError("one row per dimension expected")
        for i, row in enumerate(self.rows):
            for j, w in row:
                if not 0 <= j < self.n:
                    raise LinalgError(f"row {i}: column {j} out of range")
                if w == 0:
                    raise LinalgError(f"row {i}: explicit zero")

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a, dtype=float)
        rows = tuple(tuple((j, float(x)) for j, x in enumerate(r) if x != 0) for r in a)
        return cls(a.shape[0], rows)

    def csr(self):
        if self._csr is None:
            data, cols, ptr = [], [], [0]
            for row in self.rows:
                for j, w in row:
                    cols.append(j)
                    data.append(float(w))
                ptr.append(len(cols))
            m = sp.csr_matrix((data, cols, ptr), shape=(self.n, self.n))
            m.sum_duplicates()
            object.__setattr__(self, "_csr", m)
        return self._csr

    def dense(self):
        return self.csr().toarray()

    def __matmul__(self, v):
        return self.csr() @ v


def scc_matrix(prod, component):
    """Intra-component coefficients; local index i is ``sorted(component)[i]``."""
    nodes = sorted(component)
    local = {v: i for i, v in enumerate(nodes)}
    rows = []
    for v in nodes:
        acc = {}
        for w, p in zip(prod.succ[v], prod.weights[v]):
            j = local.get(w)
            if j is not None:
                acc[j] = acc.get(j, 0.0) + p
        rows.append(tuple(sorted(acc.items())))
    return SparseMatrix(len(nodes), tuple(rows))


def _check_dense(n):
    if n == 0:
        raise LinalgError("empty matrix")
    if n > DENSE_CAP:
        raise LinalgError(
            f"dense fallback refused for n={n} > {DENSE_CAP}; raise --max-iter instead"
        )


def _rank(a, tol):
    """Numerical rank by Gaussian elimination with partial pivoting.

    Rows are scaled to unit max-norm first, so ``tol`` bounds pivots relative
    to the largest entry of their original row.
    """
    a = np.array(a, dtype=float)
    scale = np.abs(a).max(axis=1)
    scale[scale == 0] = 1.0
    a /= scale[:, None]
    n, m = a.shape
    rank = 0
    for col in range(m):
        if rank == n:
            break
        p = rank + int(np.argmax(np.abs(a[rank:, col])))
        if abs(a[p, col]) <= tol:
            continue
        a[[rank, p]] = a[[p, rank]]
        below = a[rank + 1 :, col] / a[rank, col]
        a[rank + 1 :, col:] -= np.outer(below, a[rank, col:])
        rank += 1
    return rank


def positivity_rank(m, tol=RANK_TOL):
    """True iff ``rank(M - I) < n``, i.e. 1 is an eigenvalue of ``M``."""
    _check_dense(m.n)
    return _rank(m.dense() - np.eye(m.n), tol) < m.n


def null_vector(m, norm_row=None):
    """Solve ``(M - I) v = 0`` together with ``norm_row . v = 1``.

    The last equation of ``M - I`` is replaced by the normalisation row
    (all ones by default). For an irreducible ``M`` with eigenvalue 1 every
    ``n-1`` rows of ``M - I`` are independent, so the system is regular.
    """
    _check_dense(m.n)
    a = m.dense() - np.eye(m.n)
    a[-1, :] = 1.0 if norm_row is None else norm_row
    b = np.zeros(m.n)
    b[-1] = 1.0
    try:
        return scipy.linalg.solve(a, b)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise LinalgError(f"normalised eigen-system is singular: {e}") from None


@dataclass(frozen=True)
class PowerResult:
    verdict: str
    vector: np.ndarray = None
    iterations: int = 0
    fallback: bool = False


def _step(csr, v):
    return 0.5 * (v + csr @ v)


def power_iterate(m, eps=EPS, max_iter=MAX_ITER, rank_tol=RANK_TOL):
    """Positivity by iterating ``Mbar = (I + M)/2`` from the all-ones vector.

    Zero when an iterate decreases in every entry by at least a factor
    ``1 - eps``; Positive when an increment is at most ``eps/2 * |v|_inf``,
    which gives ``|Mv - v|_inf <= eps * |v|_inf`` for the returned ``v``.
    After ``max_iter`` undecided steps the rank test decides, and a positive
    verdict is refined by iterating from the null vector.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if m.n == 0:
        raise LinalgError("empty matrix")
    csr = m.csr()
    v = np.ones(m.n)
    for it in range(1, max_iter + 1):
        w = _step(csr, v)
        if np.all(w <= (1.0 - eps) * v):
            return PowerResult(ZERO, None, it)
        if np.max(np.abs(w - v)) <= 0.5 * eps * np.max(np.abs(w)):
            return PowerResult(POSITIVE, v, it)
        v = w
    if not positivity_rank(m, rank_tol):
        return PowerResult(ZERO, None, max_iter, fallback=True)
    v = np.abs(null_vector(m))
    v /= v.max()
    for it in range(1, max_iter + 1):
        w = _step(csr, v)
        if np.max(np.abs(w - v)) <= 0.5 * eps * np.max(np.abs(w)):
            return PowerResult(POSITIVE, v, max_iter + it, fallback=True)
        if np.all(w <= (1.0 - eps) * v):
            break
        v = w
    raise LinalgError("power iteration and rank test disagree on positivity")


def refine_eigenvector(m, v, tol=1e-14, max_iter=MAX_ITER, patience=64):
    """Continue the ``Mbar`` iteration until increments fall below ``tol``.

    The stopping increment of :func:`power_iterate` bounds the error only up
    to the spectral gap of ``Mbar``; values built from the eigenvector need
    a tighter vector. Stops early once the increment has not improved for
    ``patience`` steps (round-off floor). Returns ``(v, steps)``.
    """
    csr = m.csr()
    best = np.inf
    stale = 0
    for it in range(1, max_iter + 1):
        w = _step(csr, v)
        d = np.max(np.abs(w - v)) / max(np.max(np.abs(w)), 1e-300)
        v = w
        if d <= tol:
            return v, it
        if d < best:
            best, stale = d, 0
        else:
            stale += 1
            if stale >= patience:
                return v, it
    return v, max_iter


def _residual(a, x, b):
    return float(np.max(np.abs(x - (a @ x + b)))) if len(x) else 0.0


def solve_absorbing(a, b, tol=SOLVE_TOL, max_sweeps=MAX_ITER, stall=1000):
    """Unique fixed point of ``x = A x + b`` for ``rho(A) < 1``.

    Gauss-Seidel sweeps in index order (callers put successors first, so
    acyclic parts settle in one sweep). Falls back to dense LU after
    ``max_sweeps`` sweeps or when the residual has not improved for
    ``stall`` sweeps. Returns ``(x, residual, sweeps)``.
    """
    csr = a.csr() if isinstance(a, SparseMatrix) else sp.csr_matrix(a)
    n = csr.shape[0]
    b = np.asarray(b, dtype=float)
    if n == 0:
        return np.zeros(0), 0.0, 0
    lower = sp.eye(n, format="csr") - sp.tril(csr, k=0, format="csr")
    upper = sp.triu(csr, k=1, format="csr")
    x = np.zeros(n)
    best = np.inf
    since = 0
    res = np.inf
    for sweep in range(1, max_sweeps + 1):
        x = spsolve_triangular(lower, upper @ x + b, lower=True)
        res = _residual(csr, x, b)
        if res <= tol:
            return x, res, sweep
        if res < best * 0.999:
            best, since = res, 0
        else:
            since += 1
            if since >= stall:
                break
    if n > DENSE_CAP:
        raise LinalgError(
            f"outer system did not converge (residual {res:.3e}) and n={n} exceeds the dense cap"
        )
    try:
        x = scipy.linalg.solve(np.eye(n) - csr.toarray(), b)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise LinalgError(f"outer system is singular: {e}") from None
    res = _residual(csr, x, b)
    if not res <= 1e3 * tol:
        raise LinalgError(f"outer system residual {res:.3e} after LU fallback")
    return x, res, sweep
