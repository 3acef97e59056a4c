"""Lagrangian subspaces of C^n + C^n and the unitary correspondence.

The ambient space carries the complex structure

    J = [[0, I], [-I, 0]]

in the H+ (+) H- block split, and a subspace L of dimension n is lagrangian
when JL is its orthocomplement.  Lagrangians are stored as orthonormal
2n x n frames.  The Cayley graph map

    U  |->  span{ ((1+U)v, -i(1-U)v) : v in C^n }

is a bijection onto the lagrangians; its inverse goes through the
reflection R_L = 2 P_L - 1 restricted to the -i eigenspace of J,
conjugated by the canonical isometries

    phi_-(v) = (v + iJv)/sqrt(2),      phi_+(v) = (v - iJv)/sqrt(2).

The -i in the second Cayley component is a sign convention: it makes the
scalar chart map  lam |-> i(1+lam)/(1-lam)  orientation preserving, which
every downstream sign (Maslov, intersection numbers) relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, PreconditionError
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    as_complex_matrix,
    require_hermitian,
    require_unitary,
    hermitian_eig,
    subspace_intersection_dim,
)

__all__ = [
    "LagrangianFrame",
    "J_matrix",
    "standard_lagrangians",
    "cayley_graph",
    "lagrangian_to_unitary",
    "reflection_of",
    "graph_projection",
    "chart_point",
    "chart_coordinates",
    "switched_graph",
    "unitary_of_operator",
]

_FRAME_TOL = 1e-10


def J_matrix(n: int) -> np.ndarray:
    """The 2n x 2n complex structure [[0, I], [-I, 0]]."""
    j = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    return j


@dataclass(frozen=True)
class LagrangianFrame:
    """Orthonormal 2n x n frame spanning a lagrangian subspace."""

    frame: np.ndarray

    def __post_init__(self):
        z = as_complex_matrix(self.frame)
        if z.ndim != 2 or z.shape[0] != 2 * z.shape[1]:
            raise InputError("lagrangian frame must be 2n x n")
        n = z.shape[1]
        gram = z.conj().T @ z
        if np.abs(gram - np.eye(n)).max(initial=0.0) > _FRAME_TOL:
            raise InputError("frame columns are not orthonormal")
        form = z.conj().T @ (J_matrix(n) @ z)
        if np.abs(form).max(initial=0.0) > _FRAME_TOL:
            raise InputError("frame does not span a lagrangian subspace")
        object.__setattr__(self, "frame", z)

    @property
    def n(self) -> int:
        return self.frame.shape[1]

    def projection(self) -> np.ndarray:
        """Orthogonal projection Z Z* onto the subspace."""
        return self.frame @ self.frame.conj().T


def standard_lagrangians(n: int) -> tuple[LagrangianFrame, LagrangianFrame]:
    """The horizontal and vertical coordinate lagrangians ([I;0], [0;I])."""
    if n < 1:
        raise InputError("dimension must be >= 1")
    top = np.vstack([np.eye(n), np.zeros((n, n))]).astype(np.complex128)
    bot = np.vstack([np.zeros((n, n)), np.eye(n)]).astype(np.complex128)
    return LagrangianFrame(top), LagrangianFrame(bot)


def cayley_graph(u) -> LagrangianFrame:
    """Lagrangian spanned by ((1+U)v, -i(1-U)v).

    The raw column block M = [1+U; -i(1-U)] satisfies M*M = 4I for unitary
    U, so M/2 is already an orthonormal frame; no re-orthonormalization is
    performed.
    """
    u = require_unitary(u)
    n = u.shape[0]
    eye = np.eye(n)
    m = np.vstack([eye + u, -1j * (eye - u)])
    return LagrangianFrame(0.5 * m)


def _phi_frames(n: int) -> tuple[np.ndarray, np.ndarray]:
    # isometries C^n -> Ker(J+i) and C^n -> Ker(J-i), as 2n x n frames
    eye = np.eye(n)
    phi_minus = np.vstack([eye, -1j * eye]) / np.sqrt(2.0)
    phi_plus = np.vstack([eye, 1j * eye]) / np.sqrt(2.0)
    return phi_minus, phi_plus


def lagrangian_to_unitary(lag: LagrangianFrame) -> np.ndarray:
    """Inverse of the Cayley graph map.

    Restricts the reflection R_L to Ker(J+i) and reads it as a unitary of
    C^n through the isometries phi_-+; exact inverse of :func:`cayley_graph`
    up to rounding.
    """
    z = lag.frame
    n = lag.n
    refl = 2.0 * (z @ z.conj().T) - np.eye(2 * n)
    phi_minus, phi_plus = _phi_frames(n)
    u = phi_plus.conj().T @ refl @ phi_minus
    return u


def reflection_of(lag: LagrangianFrame) -> np.ndarray:
    """Orthogonal reflection R = 2ZZ* - I; R^2 = I, R = R*, RJ = -JR."""
    z = lag.frame
    return 2.0 * (z @ z.conj().T) - np.eye(2 * lag.n)


def _inv_sqrt_eye_plus_sq(s: np.ndarray) -> np.ndarray:
    # (1 + S^2)^(-1/2) for Hermitian S, via eigendecomposition
    vals, vecs = hermitian_eig(s)
    return (vecs * (1.0 / np.sqrt(1.0 + vals**2))) @ vecs.conj().T


def chart_point(base: LagrangianFrame, s) -> LagrangianFrame:
    """Lagrangian {v + JSv : v in L0}, the Arnold-chart point of S.

    S is the Hermitian chart coordinate in the basis of ``base``'s frame.
    The raw frame Z0 + (J Z0) S has Gram matrix 1 + S^2, so the
    orthonormalized frame is (Z0 + J Z0 S)(1+S^2)^(-1/2).
    """
    s = require_hermitian(s)
    z0 = base.frame
    n = base.n
    if s.shape[0] != n:
        raise InputError("chart coordinate size does not match the base frame")
    jz0 = J_matrix(n) @ z0
    raw = z0 + jz0 @ s
    return LagrangianFrame(raw @ _inv_sqrt_eye_plus_sq(s))


def graph_projection(base: LagrangianFrame, s) -> np.ndarray:
    """Orthogonal projection onto chart_point(base, S), by the block formula.

    In the L0 (+) L0-perp split (frames Z0 and J Z0, in which J: L0 ->
    L0-perp is the identity matrix) the projection has blocks

        [ (1+S^2)^-1      (1+S^2)^-1 S   ]
        [ (1+S^2)^-1 S    (1+S^2)^-1 S^2 ]

    assembled back to a 2n x 2n ambient matrix.
    """
    s = require_hermitian(s)
    z0 = base.frame
    n = base.n
    if s.shape[0] != n:
        raise InputError("chart coordinate size does not match the base frame")
    jz0 = J_matrix(n) @ z0
    inv = np.linalg.inv(np.eye(n) + s @ s)
    basis = np.hstack([z0, jz0])
    blocks = np.block([[inv, inv @ s], [s @ inv, s @ inv @ s]])
    return basis @ blocks @ basis.conj().T


def chart_coordinates(lag: LagrangianFrame, base: LagrangianFrame,
                      tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Hermitian S with chart_point(base, S) = lag, when lag is in the chart.

    The chart condition is invertibility of R_L + R_L0; numerically its
    smallest singular value must exceed rank_eps.
    """
    if lag.n != base.n:
        raise InputError("frames live in different ambient dimensions")
    r_sum = reflection_of(lag) + reflection_of(base)
    smin = np.linalg.svd(r_sum, compute_uv=False)[-1]
    if smin <= tol.rank_eps:
        raise PreconditionError("not in chart")
    z0 = base.frame
    jz0 = J_matrix(base.n) @ z0
    a = z0.conj().T @ lag.frame       # P_L0 restricted to L, in coordinates
    b = jz0.conj().T @ lag.frame      # P_L0perp restricted to L
    s = b @ np.linalg.inv(a)
    herm_defect = np.abs(s - s.conj().T).max()
    if herm_defect > 1e-6 * max(1.0, np.abs(s).max()):
        raise PreconditionError("not in chart")
    return 0.5 * (s + s.conj().T)


def switched_graph(t) -> LagrangianFrame:
    """Lagrangian {(Tw, w)} encoding a Hermitian operator T."""
    t = require_hermitian(t)
    n = t.shape[0]
    raw = np.vstack([t, np.eye(n)])
    return LagrangianFrame(raw @ _inv_sqrt_eye_plus_sq(t))


def unitary_of_operator(t) -> np.ndarray:
    """Unitary U = 1 - 2i (T + i)^{-1} whose Cayley graph is switched_graph(T)."""
    t = require_hermitian(t)
    n = t.shape[0]
    return np.eye(n) - 2j * np.linalg.inv(t + 1j * np.eye(n))


def lagrangian_vertical_intersection_dim(lag: LagrangianFrame,
                                         tol: Tolerance = DEFAULT_TOL) -> int:
    """dim(L ∩ H-), the vertical intersection dimension."""
    _, h_minus = standard_lagrangians(lag.n)
    return subspace_intersection_dim(lag.frame, h_minus.frame, tol)
