"""Dense complex linear-algebra substrate.

Hermitian eigendecomposition, numerical kernels and subspace intersections
with explicit, scale-invariant tolerances.  Everything downstream (charts,
reductions, flows, intersection numbers) sits on these few primitives, so
their contracts are deliberately narrow:

* eigenvalues come back ascending, eigenvectors as a unitary frame,
* rank decisions use a relative threshold ``rank_eps * max(1, sigma_max)``,
* frames are 2-d complex arrays whose *columns* are the basis vectors.

The complex inner product is linear in the first argument and conjugate
linear in the second, matching the usual mathematical convention; see
:func:`inner`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, PreconditionError

__all__ = [
    "Tolerance",
    "inner",
    "as_complex_matrix",
    "symmetrize",
    "require_hermitian",
    "require_unitary",
    "hermitian_eig",
    "numeric_kernel",
    "numeric_rank",
    "orthonormalize",
    "orthocomplement_basis",
    "subspace_intersection_dim",
    "subspace_intersection_basis",
    "subspaces_equal",
]

_HERM_TOL = 1e-12
_UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds used by rank and crossing decisions.

    rank_eps drives kernel/rank extraction (relative to the largest
    singular value, floored at 1), crossing_eps drives nondegeneracy
    decisions for crossings of eigenvalue branches.
    """

    rank_eps: float = 1e-8
    crossing_eps: float = 1e-9

    def __post_init__(self):
        if not (self.rank_eps > 0 and self.crossing_eps > 0):
            raise InputError("tolerances must be positive")


DEFAULT_TOL = Tolerance()


def inner(u, v):
    """Complex inner product <u, v>, linear in u, conjugate linear in v."""
    return complex(np.vdot(np.asarray(v), np.asarray(u)))


def as_complex_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-d complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise InputError(f"expected a matrix, got array of ndim {m.ndim}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise InputError("matrix entries must be finite")
    return m


def symmetrize(m) -> np.ndarray:
    """Return the Hermitian part (M + M*)/2."""
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise InputError("cannot symmetrize a non-square matrix")
    return 0.5 * (m + m.conj().T)


def require_hermitian(m, tol: float = _HERM_TOL) -> np.ndarray:
    """Validate the Hermitian defect and return the symmetrized matrix.

    The defect ||M - M*||_max must stay below ``tol * max(1, ||M||_max)``.
    """
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise InputError("Hermitian matrix must be square")
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    defect = float(np.abs(m - m.conj().T).max(initial=0.0))
    if defect > tol * scale:
        raise InputError(f"matrix is not Hermitian (defect {defect:.3e})")
    return 0.5 * (m + m.conj().T)


def require_unitary(u, tol: float = _UNITARY_TOL) -> np.ndarray:
    """Validate U*U = I up to ``tol`` and return U as complex128."""
    u = as_complex_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise InputError("unitary matrix must be square")
    n = u.shape[0]
    res = float(np.abs(u.conj().T @ u - np.eye(n)).max(initial=0.0))
    if res > tol:
        raise InputError(f"matrix is not unitary (residual {res:.3e})")
    return u


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvector matrix with unitary
    columns) such that ``M v_j = lam_j v_j``.
    """
    m = symmetrize(m)
    try:
        vals, vecs = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise PreconditionError("eig failure") from exc
    return vals, vecs


def numeric_rank(m, tol: Tolerance = DEFAULT_TOL) -> int:
    """Numerical rank at the relative threshold rank_eps * max(1, sigma_max)."""
    m = as_complex_matrix(m)
    if min(m.shape) == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    thresh = tol.rank_eps * max(1.0, float(s[0]))
    return int(np.sum(s > thresh))


def numeric_kernel(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal frame of the approximate kernel of M.

    A direction counts as kernel when its singular value satisfies
    ``sigma <= rank_eps * max(1, sigma_max)``.  The result is a
    cols x k array; k may be zero.
    """
    m = as_complex_matrix(m)
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return np.eye(cols, dtype=np.complex128)
    _, s, vh = np.linalg.svd(m)
    thresh = tol.rank_eps * max(1.0, float(s[0]) if s.size else 0.0)
    # singular values below the threshold, padded for a wide/rank-deficient m
    nkeep = int(np.sum(s > thresh))
    return vh[nkeep:].conj().T.copy()


def orthonormalize(a, drop_eps: float = 1e-12) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Columns whose remainder falls below ``drop_eps`` times the original
    column scale are dropped, so the result always has orthonormal columns
    spanning the numerical range of ``a`` (in column order).
    """
    a = as_complex_matrix(a)
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    cols = []
    for j in range(a.shape[1]):
        v = a[:, j].copy()
        for _ in range(2):  # re-orthogonalization pass
            for q in cols:
                v -= np.vdot(q, v) * q
        nrm = np.linalg.norm(v)
        if nrm > drop_eps * scale:
            cols.append(v / nrm)
    if not cols:
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    return np.column_stack(cols)


def orthocomplement_basis(frame, dim_ambient: int | None = None,
                          tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Deterministic orthonormal basis of the orthocomplement of a frame.

    Projects the standard basis vectors onto the complement and keeps a
    maximal independent set greedily in index order, so that when ``frame``
    spans standard basis vectors the complement comes out as the remaining
    standard basis vectors, in index order.
    """
    frame = as_complex_matrix(frame)
    n = frame.shape[0] if dim_ambient is None else dim_ambient
    if frame.shape[1] == 0:
        return np.eye(n, dtype=np.complex128)
    q = orthonormalize(frame)
    resid = np.eye(n, dtype=np.complex128) - q @ q.conj().T
    want = n - q.shape[1]
    cols = []
    for j in range(n):
        v = resid[:, j].copy()
        for _ in range(2):
            for c in cols:
                v -= np.vdot(c, v) * c
        nrm = np.linalg.norm(v)
        if nrm > 1e-7:
            cols.append(v / nrm)
        if len(cols) == want:
            break
    if len(cols) != want:
        raise PreconditionError("orthocomplement extraction failed")
    if not cols:
        return np.zeros((n, 0), dtype=np.complex128)
    return np.column_stack(cols)


def _check_frames_compatible(f1, f2):
    f1 = as_complex_matrix(f1)
    f2 = as_complex_matrix(f2)
    if f1.shape[0] != f2.shape[0]:
        raise InputError("frames live in different ambient dimensions")
    return f1, f2


def subspace_intersection_dim(f1, f2, tol: Tolerance = DEFAULT_TOL) -> int:
    """dim(span F1 ∩ span F2) via the kernel of the block [F1 | -F2]."""
    f1, f2 = _check_frames_compatible(f1, f2)
    if f1.shape[1] == 0 or f2.shape[1] == 0:
        return 0
    block = np.hstack([f1, -f2])
    return numeric_kernel(block, tol).shape[1]


def subspace_intersection_basis(f1, f2, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal ambient basis of span F1 ∩ span F2."""
    f1, f2 = _check_frames_compatible(f1, f2)
    if f1.shape[1] == 0 or f2.shape[1] == 0:
        return np.zeros((f1.shape[0], 0), dtype=np.complex128)
    ker = numeric_kernel(np.hstack([f1, -f2]), tol)
    if ker.shape[1] == 0:
        return np.zeros((f1.shape[0], 0), dtype=np.complex128)
    vecs = f1 @ ker[: f1.shape[1]]
    return orthonormalize(vecs)


def subspaces_equal(f1, f2, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether two orthonormal frames span the same subspace."""
    f1, f2 = _check_frames_compatible(f1, f2)
    if f1.shape[1] != f2.shape[1]:
        return False
    return subspace_intersection_dim(f1, f2, tol) == f1.shape[1]
