"""The universal family -i d/dt on [0, 1] with boundary condition f(1) = U f(0).

Separation of variables gives the exact spectrum: f(t) = e^{i lam t} f(0)
satisfies the boundary condition iff e^{i lam} is an eigenvalue of U, so
the eigenvalues are theta_j + 2 pi k with e^{i theta_j} the eigenvalues
of U and theta_j in (-pi, pi].  A centered-difference discretization with
the U-twisted wrap block is Hermitian by construction and reproduces the
low modes at second order in 1/m.

Loops in U(N) produce integer spectral flows through the winding of the
eigenphases; the symplectic reduction of the family by the complement of
the constant functions lands back in U(N) as the Moebius involution

    U |-> (1 - 3U)(3 - U)^{-1},

whose Cayley graph equals the directly reduced boundary lagrangian
{(i(1-U)b, (1+U)b/2)}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InputError, PreconditionError
from .flow import _circular_movement, _match_lift, _unitary_geodesic
from .grassmann import LagrangianFrame
from .linalg import orthonormalize, require_unitary

__all__ = [
    "UnitaryLoop",
    "exact_spectrum",
    "discretize_operator",
    "universal_loop_flow",
    "universal_reduction",
    "reduced_boundary_frame",
    "discretized_path",
]

_MIN_NODES = 16
_MAX_LEVELS = 12


def exact_spectrum(u, window: tuple[float, float]) -> np.ndarray:
    """Sorted eigenvalues theta_j + 2 pi k of the boundary operator in [a, b].

    Every unitary eigenphase contributes one entry per admissible k, so
    multiplicities of e^{i theta} are reflected verbatim.
    """
    u = require_unitary(u)
    a, b = float(window[0]), float(window[1])
    if not (np.isfinite(a) and np.isfinite(b) and a <= b):
        raise InputError("window must be a finite interval")
    phases = np.angle(np.linalg.eigvals(u))
    out = []
    for theta in phases:
        k_lo = int(np.ceil((a - theta) / (2 * np.pi) - 1e-15))
        k_hi = int(np.floor((b - theta) / (2 * np.pi) + 1e-15))
        out.extend(theta + 2 * np.pi * k for k in range(k_lo, k_hi + 1))
    return np.sort(np.array(out))


def discretize_operator(u, m: int) -> np.ndarray:
    """Centered-difference model of -i d/dt with the U-twisted wrap.

    m nodes t_l = l/m; the shift couples node m-1 back to node 0 through
    U, so  D = (-i/2h) (S - S*)  is Hermitian exactly and its low
    eigenvalues are m sin((theta + 2 pi k)/m), an O(1/m^2) approximation
    of the exact spectrum.
    """
    u = require_unitary(u)
    if m < _MIN_NODES:
        raise InputError("discretization needs at least 16 nodes")
    n = u.shape[0]
    h = 1.0 / m
    shift = np.zeros((m * n, m * n), dtype=np.complex128)
    eye = np.eye(n)
    for l in range(m - 1):
        shift[l * n:(l + 1) * n, (l + 1) * n:(l + 2) * n] = eye
    shift[(m - 1) * n:, :n] = u
    return (-1j / (2.0 * h)) * (shift - shift.conj().T)


@dataclass(frozen=True)
class UnitaryLoop:
    """Closed sampled path in U(N) on [0, 1] with matching endpoints."""

    grid: np.ndarray
    values: tuple[np.ndarray, ...]
    func: Callable[[float], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or g.size < 2 or not np.all(np.diff(g) > 0):
            raise InputError("loop grid must be strictly increasing")
        if abs(g[0]) > 1e-12 or abs(g[-1] - 1.0) > 1e-12:
            raise InputError("loop grid must run from 0 to 1")
        vals = tuple(require_unitary(v) for v in self.values)
        if len(vals) != g.size:
            raise InputError("one unitary per grid node required")
        dim = vals[0].shape[0]
        if any(v.shape[0] != dim for v in vals):
            raise InputError("all loop values must share one dimension")
        if np.abs(vals[0] - vals[-1]).max() > 1e-9:
            raise InputError("loop endpoints do not match")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, func, nodes: int = 33) -> "UnitaryLoop":
        grid = np.linspace(0.0, 1.0, max(int(nodes), 2))
        vals = tuple(require_unitary(func(t)) for t in grid)
        return cls(grid, vals, func)

    @property
    def dim(self) -> int:
        return self.values[0].shape[0]

    def value_at(self, t: float) -> np.ndarray:
        t = min(max(float(t), 0.0), 1.0)
        if self.func is not None:
            return require_unitary(self.func(t))
        i = int(np.searchsorted(self.grid, t, side="right") - 1)
        i = min(max(i, 0), self.grid.size - 2)
        a, b = self.grid[i], self.grid[i + 1]
        s = (t - a) / (b - a)
        if s <= 0.0:
            return self.values[i]
        if s >= 1.0:
            return self.values[i + 1]
        return _unitary_geodesic(self.values[i], self.values[i + 1], s)


def universal_loop_flow(loop: UnitaryLoop) -> int:
    """Spectral flow of the boundary operators along a loop of unitaries.

    Eigenphase branches theta_j(t) are lifted continuously by
    nearest-angle matching; each passage of a lifted branch through a
    multiple of 2 pi is a zero crossing of one eigenvalue branch
    theta_j + 2 pi k, counted with the slope sign.  The sampling is
    refined by halving until the count stabilizes twice.
    """
    phases0 = np.angle(np.linalg.eigvals(loop.value_at(0.0)))
    if np.min(np.abs(phases0)) <= 1e-12:
        raise PreconditionError("degenerate endpoint")

    history: list[int] = []
    for level in range(_MAX_LEVELS + 1):
        count = _loop_flow_at_level(loop, 2**level)
        if count is not None:
            history.append(count)
            if len(history) >= 3 and history[-1] == history[-2] == history[-3]:
                return count
    raise PreconditionError("grid too coarse")


def _loop_flow_at_level(loop: UnitaryLoop, factor: int) -> int | None:
    ts: list[float] = []
    for a, b in zip(loop.grid[:-1], loop.grid[1:]):
        ts.extend(np.linspace(a, b, factor + 1)[:-1])
    ts.append(loop.grid[-1])

    raws = [np.sort(np.angle(np.linalg.eigvals(loop.value_at(t)))) for t in ts]
    for a, b in zip(raws[:-1], raws[1:]):
        if _circular_movement(a, b) > 0.4 * np.pi:
            return None  # refine further

    raw = raws[0].copy()
    lift = raws[0].copy()
    lifts = [lift.copy()]
    for cur in raws[1:]:
        raw, lift = _match_lift(raw, lift, cur)
        lifts.append(lift.copy())

    total = 0
    two_pi = 2.0 * np.pi
    for la, lb in zip(lifts[:-1], lifts[1:]):
        total += int(np.sum(np.floor(lb / two_pi) - np.floor(la / two_pi)))
    return total


def universal_reduction(u) -> np.ndarray:
    """The Moebius involution (1 - 3U)(3 - U)^{-1} of the unitary group."""
    u = require_unitary(u)
    n = u.shape[0]
    return (np.eye(n) - 3.0 * u) @ np.linalg.inv(3.0 * np.eye(n) - u)


def reduced_boundary_frame(u) -> LagrangianFrame:
    """Frame of the reduced boundary lagrangian {(i(1-U)b, (1+U)b/2)}.

    Equals the Cayley graph of universal_reduction(u) as a subspace.
    """
    u = require_unitary(u)
    n = u.shape[0]
    raw = np.vstack([1j * (np.eye(n) - u), 0.5 * (np.eye(n) + u)])
    return LagrangianFrame(orthonormalize(raw))


def discretized_path(loop: UnitaryLoop, m: int = 256):
    """Hermitian path of discretized boundary operators along a loop."""
    from .flow import HermitianPath

    return HermitianPath.from_function(
        lambda t: discretize_operator(loop.value_at(t), m),
        nodes=max(loop.grid.size, 9),
    )
