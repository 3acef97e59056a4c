"""Spectral flow of Hermitian paths and Maslov index of lagrangian paths.

Two independent spectral-flow algorithms are provided:

* :func:`spectral_flow_crossing` locates each zero crossing of the sorted
  eigenvalue branches by bisection and adds the signature of the crossing
  form  v |-> <dA/dt v, v>  on the numerical kernel (for a simple crossing
  this is sign<dA v, v>, the classical local flow),
* :func:`spectral_flow_tracking` follows eigenvalue branches across the
  grid, matched by minimal total displacement, counts signed sign changes
  and refines the grid by halving until the count stabilizes twice.

The Maslov index of a path of lagrangians counts crossings with the train
{dim(L ∩ H-) = 1}, located through the eigenphases of the Arnold unitary
U(t) passing through pi, with local sign sgn<-J dP/dt v, v> on a unit
vector v of L ∩ H-.  On switched graphs of a Hermitian path the two
notions agree crossing by crossing.

Crossings are only counted in the open interior (0, 1); paths whose
endpoints are degenerate are rejected rather than half-counted, which
makes concatenation additivity exact for admissible subdivisions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InputError, PreconditionError
from .grassmann import J_matrix, LagrangianFrame, cayley_graph, lagrangian_to_unitary
from .linalg import DEFAULT_TOL, Tolerance, numeric_kernel, symmetrize

__all__ = [
    "HermitianPath",
    "LagrangianPath",
    "Crossing",
    "spectral_flow_crossing",
    "spectral_flow_tracking",
    "maslov_index",
]

_MAX_DEPTH = 40
_MAX_TRACK_LEVELS = 12
_NODE_SHIFT = 1e-7
_FD_STEP = 1e-4


@dataclass(frozen=True)
class Crossing:
    """A located crossing with its local signed contribution."""

    t: float
    sign: int

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "sign", int(self.sign))


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 2:
        raise InputError("grid needs at least two nodes")
    if not np.all(np.diff(g) > 0):
        raise InputError("grid must be strictly increasing")
    if abs(g[0]) > 1e-12 or abs(g[-1] - 1.0) > 1e-12:
        raise InputError("grid must run from 0 to 1")
    g[0], g[-1] = 0.0, 1.0
    return g


@dataclass(frozen=True)
class HermitianPath:
    """One-parameter family of Hermitian matrices on [0, 1].

    Sampled values are interpolated linearly between nodes; when ``func``
    is supplied it is used instead (the samples then only seed crossing
    detection).  Analytic derivatives may be supplied per node or as
    ``dfunc``; otherwise derivatives come from Richardson-extrapolated
    central differences.
    """

    grid: np.ndarray
    values: tuple[np.ndarray, ...]
    derivatives: tuple[np.ndarray, ...] | None = None
    func: Callable[[float], np.ndarray] | None = field(default=None, compare=False)
    dfunc: Callable[[float], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        g = _check_grid(self.grid)
        vals = tuple(symmetrize(v) for v in self.values)
        if len(vals) != g.size:
            raise InputError("one value per grid node required")
        dim = vals[0].shape[0]
        if any(v.shape[0] != dim for v in vals):
            raise InputError("all path values must share one dimension")
        derivs = self.derivatives
        if derivs is not None:
            derivs = tuple(symmetrize(d) for d in derivs)
            if len(derivs) != g.size or any(d.shape[0] != dim for d in derivs):
                raise InputError("derivative samples must match the grid and dimension")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "derivatives", derivs)

    @classmethod
    def from_function(cls, func, nodes: int = 9, dfunc=None) -> "HermitianPath":
        grid = np.linspace(0.0, 1.0, max(int(nodes), 2))
        vals = [symmetrize(func(t)) for t in grid]
        return cls(grid, tuple(vals), None, func, dfunc)

    @property
    def dim(self) -> int:
        return self.values[0].shape[0]

    def value_at(self, t: float) -> np.ndarray:
        t = min(max(float(t), 0.0), 1.0)
        if self.func is not None:
            return symmetrize(self.func(t))
        i = int(np.searchsorted(self.grid, t, side="right") - 1)
        i = min(max(i, 0), self.grid.size - 2)
        a, b = self.grid[i], self.grid[i + 1]
        s = (t - a) / (b - a)
        return (1.0 - s) * self.values[i] + s * self.values[i + 1]

    def derivative_at(self, t: float) -> np.ndarray:
        t = min(max(float(t), 0.0), 1.0)
        if self.dfunc is not None:
            return symmetrize(self.dfunc(t))
        if self.derivatives is not None:
            i = int(np.searchsorted(self.grid, t, side="right") - 1)
            i = min(max(i, 0), self.grid.size - 2)
            a, b = self.grid[i], self.grid[i + 1]
            s = (t - a) / (b - a)
            return (1.0 - s) * self.derivatives[i] + s * self.derivatives[i + 1]
        return _richardson_derivative(self.value_at, t, self._fd_step(t))

    def _fd_step(self, t: float) -> float:
        spacing = float(np.min(np.diff(self.grid)))
        h = min(spacing, _FD_STEP)
        if 0.0 < t < 1.0:
            h = min(h, t / 2.0, (1.0 - t) / 2.0)
        return max(h, 1e-12)

    def restricted(self, a: float, b: float) -> "HermitianPath":
        """Sub-path over [a, b], reparametrized to [0, 1]."""
        if not (0.0 <= a < b <= 1.0):
            raise InputError("invalid restriction interval")
        inner = [t for t in self.grid if a < t < b]
        new_grid = np.array([a] + inner + [b])
        scaled = (new_grid - a) / (b - a)
        scaled[0], scaled[-1] = 0.0, 1.0
        vals = tuple(self.value_at(t) for t in new_grid)
        func = None
        if self.func is not None:
            base = self.func
            func = lambda s, _a=a, _b=b: base(_a + (_b - _a) * s)  # noqa: E731
        dfunc = None
        if self.dfunc is not None:
            dbase = self.dfunc
            dfunc = lambda s, _a=a, _b=b: (_b - _a) * dbase(_a + (_b - _a) * s)  # noqa: E731
        path = HermitianPath(scaled, vals, None, func, dfunc)
        if func is None and self.dfunc is None and self.derivatives is not None:
            derivs = tuple((b - a) * self.derivative_at(t) for t in new_grid)
            path = HermitianPath(scaled, vals, derivs, None, None)
        return path


def _richardson_derivative(f, t: float, h: float) -> np.ndarray:
    def central(step):
        return (f(t + step) - f(t - step)) / (2.0 * step)

    d1 = central(h)
    d2 = central(h / 2.0)
    return symmetrize((4.0 * d2 - d1) / 3.0)


def _sorted_eigs(m: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(symmetrize(m))


def _refine_grid(grid: np.ndarray, factor: int) -> np.ndarray:
    out = []
    for a, b in zip(grid[:-1], grid[1:]):
        out.extend(np.linspace(a, b, factor + 1)[:-1])
    out.append(grid[-1])
    return np.array(out)


def _shift_interior_zeros(ts: np.ndarray, eig_at, eps: float
                          ) -> tuple[np.ndarray, list[float]]:
    """Nudge interior nodes sitting on (near-)zero eigenvalues off the zero.

    Nodes whose smallest eigenvalue magnitude stays below eps even after
    nudging (the branch is flat there) are reported as touch candidates.
    """
    ts = ts.copy()
    spacing = float(np.min(np.diff(ts)))
    delta = _NODE_SHIFT * spacing
    stuck = []
    for i in range(1, ts.size - 1):
        vals = eig_at(ts[i])
        orig = ts[i]
        for _ in range(3):
            if np.min(np.abs(vals)) > eps:
                break
            ts[i] = min(ts[i] + delta, ts[i + 1] - delta)
            vals = eig_at(ts[i])
        else:
            stuck.append(float(orig))
    return ts, stuck


def _endpoint_check(eig_at, tol: Tolerance):
    for t in (0.0, 1.0):
        if np.min(np.abs(eig_at(t))) <= tol.crossing_eps:
            raise PreconditionError("degenerate endpoint")


def _branch_crossings(branch, a, b, fa, fb, touch_eps, out, depth=0):
    """Collect zeros of a continuous scalar branch on [a, b].

    Sign changes are bisected (kind "cross"); dips that keep deepening are
    resolved recursively so a branch crossing twice between nodes is still
    found, and dips below touch_eps without a sign change are reported as
    kind "touch" for the caller's kernel analysis.
    """
    if depth > _MAX_DEPTH:
        raise PreconditionError("grid too coarse")
    if fa == 0.0 or fb == 0.0:
        raise PreconditionError("grid too coarse")
    if fa * fb < 0.0:
        lo, hi, flo = a, b, fa
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            fm = branch(mid)
            if fm == 0.0 or hi - lo < 1e-15:
                lo = hi = mid
                break
            if flo * fm < 0.0:
                hi = mid
            else:
                lo, flo = mid, fm
        out.append((0.5 * (lo + hi), "cross"))
        return
    mid = 0.5 * (a + b)
    fm = branch(mid)
    if fm * fa < 0.0:
        _branch_crossings(branch, a, mid, fa, fm, touch_eps, out, depth + 1)
        _branch_crossings(branch, mid, b, fm, fb, touch_eps, out, depth + 1)
        return
    if abs(fm) <= touch_eps:
        out.append((mid, "touch"))
        return
    if abs(fm) < 0.5 * min(abs(fa), abs(fb)):
        _branch_crossings(branch, a, mid, fa, fm, touch_eps, out, depth + 1)
        _branch_crossings(branch, mid, b, fm, fb, touch_eps, out, depth + 1)


def _refine_to_minimum(fun, t0: float, halfwidth: float) -> float:
    """Golden-section refinement of a local minimum of |fun| near t0."""
    gr = 0.5 * (np.sqrt(5.0) - 1.0)
    lo = max(t0 - halfwidth, 0.0)
    hi = min(t0 + halfwidth, 1.0)
    c = hi - gr * (hi - lo)
    d = lo + gr * (hi - lo)
    fc, fd = fun(c), fun(d)
    for _ in range(90):
        if hi - lo < 1e-14:
            break
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - gr * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + gr * (hi - lo)
            fd = fun(d)
    return 0.5 * (lo + hi)


def _merge_times(times: Sequence[float], radius: float) -> list[float]:
    merged: list[list[float]] = []
    for t in sorted(times):
        if merged and t - merged[-1][-1] <= radius:
            merged[-1].append(t)
        else:
            merged.append([t])
    return [float(np.mean(group)) for group in merged]


def _merge_events(events: Sequence[tuple[float, str]], radius: float
                  ) -> list[tuple[float, bool]]:
    """Merge (time, kind) events; a group is a touch when no member crossed."""
    merged: list[tuple[list[float], bool]] = []
    for t, kind in sorted(events):
        if merged and t - merged[-1][0][-1] <= radius:
            merged[-1][0].append(t)
            merged[-1] = (merged[-1][0], merged[-1][1] or kind == "cross")
        else:
            merged.append(([t], kind == "cross"))
    return [(float(np.mean(group)), not crossed) for group, crossed in merged]


def _crossing_signature(kernel: np.ndarray, rate: np.ndarray, tol: Tolerance) -> int:
    """Signature of the crossing form on the kernel; error when singular."""
    form = kernel.conj().T @ rate @ kernel
    q = np.linalg.eigvalsh(symmetrize(form))
    if np.min(np.abs(q)) <= tol.crossing_eps:
        raise PreconditionError("degenerate crossing")
    return int(np.sum(q > 0) - np.sum(q < 0))


def spectral_flow_crossing(path: HermitianPath, tol: Tolerance = DEFAULT_TOL
                           ) -> tuple[int, list[Crossing]]:
    """Spectral flow by crossing-form evaluation at located crossings.

    Returns (flow, crossings).  Preconditions: invertible endpoints; every
    crossing must carry a nondegenerate crossing form (for a simple
    crossing this is the classical |<dA v, v>| > crossing_eps condition).
    """
    eig_at = lambda t: _sorted_eigs(path.value_at(t))  # noqa: E731
    _endpoint_check(eig_at, tol)
    scale = max(1.0, max(float(np.abs(v).max(initial=0.0)) for v in path.values))
    node_eps = max(tol.crossing_eps, 1e-12 * scale)
    ts, stuck = _shift_interior_zeros(_refine_grid(path.grid, 8), eig_at, node_eps)
    evs = np.array([eig_at(t) for t in ts])
    n = path.dim
    sub_spacing = float(np.min(np.diff(ts)))

    events: list[tuple[float, str]] = [(t, "touch") for t in stuck]
    touch_eps = max(tol.crossing_eps * 1e-3, 1e-13 * scale)
    for j in range(n):
        branch = lambda t, _j=j: float(eig_at(t)[_j])  # noqa: E731
        for i in range(ts.size - 1):
            _branch_crossings(branch, ts[i], ts[i + 1],
                              float(evs[i, j]), float(evs[i + 1, j]),
                              touch_eps, events)

    min_abs = lambda t: float(np.min(np.abs(eig_at(t))))  # noqa: E731
    flow = 0
    crossings: list[Crossing] = []
    for t_star, is_touch in _merge_events(events, 1e-9):
        if is_touch:
            # center tangential candidates on the actual minimum so the
            # crossing form is evaluated at the touch point
            t_star = _refine_to_minimum(min_abs, t_star, sub_spacing)
            if min_abs(t_star) > node_eps:
                continue
        if not (0.0 < t_star < 1.0):
            raise PreconditionError("degenerate endpoint")
        a = path.value_at(t_star)
        vals, vecs = np.linalg.eigh(symmetrize(a))
        kmask = np.abs(vals) <= max(100.0 * np.min(np.abs(vals)), node_eps)
        kernel = vecs[:, kmask]
        if kernel.shape[1] == 0:
            continue
        rate = path.derivative_at(t_star)
        sgn = _crossing_signature(kernel, rate, tol)
        crossings.append(Crossing(t_star, sgn))
        flow += sgn
    return flow, crossings


def _match_branches(prev: np.ndarray, cur: np.ndarray) -> np.ndarray:
    """Minimal total-displacement assignment of sorted eigenvalue lists."""
    n = prev.size
    if n > 64:
        return np.arange(n)
    cost = np.abs(prev[:, None] - cur[None, :])
    _, cols = linear_sum_assignment(cost)
    return cols


def spectral_flow_tracking(path: HermitianPath, tol: Tolerance = DEFAULT_TOL
                           ) -> tuple[int, list[Crossing]]:
    """Spectral flow by eigenvalue-branch tracking with adaptive refinement.

    Independent of the crossing-form route: no derivatives are used.  The
    grid is halved until the signed count of branch sign changes is stable
    over two refinements.
    """
    eig_at = lambda t: _sorted_eigs(path.value_at(t))  # noqa: E731
    _endpoint_check(eig_at, tol)
    scale = max(1.0, max(float(np.abs(v).max(initial=0.0)) for v in path.values))
    node_eps = max(tol.crossing_eps, 1e-12 * scale)

    history: list[int] = []
    detail: list[Crossing] = []
    for level in range(_MAX_TRACK_LEVELS + 1):
        ts, _ = _shift_interior_zeros(_refine_grid(path.grid, 2**level), eig_at, node_eps)
        evs = [eig_at(t) for t in ts]
        count = 0
        detail = []
        for i in range(len(ts) - 1):
            cols = _match_branches(evs[i], evs[i + 1])
            for j in range(path.dim):
                fa, fb = evs[i][j], evs[i + 1][cols[j]]
                if fa < 0.0 < fb:
                    count += 1
                    detail.append(Crossing(0.5 * (ts[i] + ts[i + 1]), 1))
                elif fb < 0.0 < fa:
                    count -= 1
                    detail.append(Crossing(0.5 * (ts[i] + ts[i + 1]), -1))
        history.append(count)
        if len(history) >= 3 and history[-1] == history[-2] == history[-3]:
            return count, sorted(detail, key=lambda c: c.t)
    raise PreconditionError("grid too coarse")


# ---------------------------------------------------------------------------
# lagrangian paths and the Maslov index


@dataclass(frozen=True)
class LagrangianPath:
    """One-parameter family of lagrangian frames on [0, 1].

    Consecutive samples must stay within subspace distance 0.5 (spectral
    norm of the projection difference), a sampling adequacy guard.  When
    ``func`` is given it supplies frames at arbitrary parameters;
    otherwise frames between nodes come from the unitary geodesic of the
    Arnold correspondents.
    """

    grid: np.ndarray
    values: tuple[LagrangianFrame, ...]
    func: Callable[[float], LagrangianFrame] | None = field(default=None, compare=False)

    def __post_init__(self):
        g = _check_grid(self.grid)
        vals = tuple(self.values)
        if len(vals) != g.size:
            raise InputError("one frame per grid node required")
        if any(not isinstance(v, LagrangianFrame) for v in vals):
            raise InputError("path values must be LagrangianFrame instances")
        n = vals[0].n
        if any(v.n != n for v in vals):
            raise InputError("all frames must share one half-dimension")
        for a, b in zip(vals[:-1], vals[1:]):
            gap = np.linalg.norm(a.projection() - b.projection(), 2)
            if gap > 0.5 + 1e-9:
                raise InputError("consecutive frames exceed subspace distance 0.5")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, func, nodes: int = 17) -> "LagrangianPath":
        """Sample a frame-valued function, refining until the 0.5 guard holds."""
        count = max(int(nodes), 2)
        for _ in range(8):
            grid = np.linspace(0.0, 1.0, count)
            vals = tuple(func(t) for t in grid)
            gaps = [np.linalg.norm(a.projection() - b.projection(), 2)
                    for a, b in zip(vals[:-1], vals[1:])]
            if max(gaps) <= 0.5:
                return cls(grid, vals, func)
            count = 2 * count - 1
        raise InputError("consecutive frames exceed subspace distance 0.5")

    @property
    def n(self) -> int:
        return self.values[0].n

    def frame_at(self, t: float) -> LagrangianFrame:
        t = min(max(float(t), 0.0), 1.0)
        if self.func is not None:
            return self.func(t)
        i = int(np.searchsorted(self.grid, t, side="right") - 1)
        i = min(max(i, 0), self.grid.size - 2)
        a, b = self.grid[i], self.grid[i + 1]
        s = (t - a) / (b - a)
        if s <= 0.0:
            return self.values[i]
        if s >= 1.0:
            return self.values[i + 1]
        ua = lagrangian_to_unitary(self.values[i])
        ub = lagrangian_to_unitary(self.values[i + 1])
        return cayley_graph(_unitary_geodesic(ua, ub, s))


def _unitary_eig(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a unitary via complex Schur (normal matrix)."""
    from scipy.linalg import schur

    t, q = schur(u, output="complex")
    return np.diag(t), q


def _unitary_geodesic(ua: np.ndarray, ub: np.ndarray, s: float) -> np.ndarray:
    ratio = ua.conj().T @ ub
    vals, vecs = _unitary_eig(ratio)
    phases = np.angle(vals)
    if np.max(np.abs(phases)) > np.pi - 1e-6:
        raise PreconditionError("grid too coarse")
    frac = (vecs * np.exp(1j * s * phases)) @ vecs.conj().T
    return ua @ frac


def _wrap_angle(x: np.ndarray) -> np.ndarray:
    return (x + np.pi) % (2.0 * np.pi) - np.pi


def _phases_of(u: np.ndarray) -> np.ndarray:
    return np.sort(np.angle(np.linalg.eigvals(u)))


def _match_lift(ref_raw: np.ndarray, ref_lift: np.ndarray, cur_raw: np.ndarray
                ) -> tuple[np.ndarray, np.ndarray]:
    """Continue lifted phase branches to the next raw phase multiset."""
    n = ref_raw.size
    diff = _wrap_angle(cur_raw[None, :] - ref_raw[:, None])
    if n <= 64:
        _, cols = linear_sum_assignment(np.abs(diff))
    else:
        cols = np.arange(n)
    new_raw = cur_raw[cols]
    new_lift = ref_lift + _wrap_angle(new_raw - ref_raw)
    return new_raw, new_lift


def _circular_movement(a_raw: np.ndarray, b_raw: np.ndarray) -> float:
    """Largest matched circular phase displacement between two multisets."""
    diff = np.abs(_wrap_angle(b_raw[None, :] - a_raw[:, None]))
    if a_raw.size <= 64:
        rows, cols = linear_sum_assignment(diff)
        return float(diff[rows, cols].max(initial=0.0))
    return float(np.abs(_wrap_angle(b_raw - a_raw)).max(initial=0.0))


def maslov_index(path: LagrangianPath, tol: Tolerance = DEFAULT_TOL
                 ) -> tuple[int, list[Crossing]]:
    """Maslov index: signed crossings with the train {dim(L ∩ H-) = 1}.

    Crossings are located as passages of the eigenphases of the Arnold
    unitary U(t) through pi (mod 2pi); the local sign is the signature of
    the form <-J dP/dt v, v> on L ∩ H-, computed from Richardson central
    differences of the frame projections.  Endpoints must be transversal
    to H-.
    """
    n = path.n
    u_at = lambda t: lagrangian_to_unitary(path.frame_at(t))  # noqa: E731

    for t in (0.0, 1.0):
        ph = _phases_of(u_at(t))
        if np.min(np.abs(np.abs(ph) - np.pi)) <= 1e-12:
            raise PreconditionError("degenerate endpoint")
        top = path.frame_at(t).frame[:n]
        if np.linalg.svd(top, compute_uv=False)[-1] <= tol.rank_eps:
            raise PreconditionError("degenerate endpoint")

    # subdivide until eigenphase movement per step is comfortably small
    ts = list(path.grid)
    raws = {t: _phases_of(u_at(t)) for t in ts}
    for _ in range(_MAX_TRACK_LEVELS + 2):
        inserts = []
        for a, b in zip(ts[:-1], ts[1:]):
            if _circular_movement(raws[a], raws[b]) > 0.4 * np.pi:
                inserts.append(0.5 * (a + b))
        if not inserts:
            break
        for t in inserts:
            raws[t] = _phases_of(u_at(t))
        ts = sorted(set(ts) | set(inserts))
    else:
        raise PreconditionError("grid too coarse")

    # nudge interior nodes sitting exactly on a crossing
    spacing = min(b - a for a, b in zip(ts[:-1], ts[1:]))
    adj = []
    for t in ts:
        if 0.0 < t < 1.0 and np.min(np.abs(np.abs(raws[t]) - np.pi)) < 1e-10:
            t_new = t + _NODE_SHIFT * spacing
            raws[t_new] = _phases_of(u_at(t_new))
            adj.append(t_new)
        else:
            adj.append(t)
    ts = adj

    # lift branches along the node chain
    lift = raws[ts[0]].copy()
    raw = raws[ts[0]].copy()
    lifted = [lift.copy()]
    raws_chain = [raw.copy()]
    for t in ts[1:]:
        raw, lift = _match_lift(raw, lift, raws[t])
        lifted.append(lift.copy())
        raws_chain.append(raw.copy())

    def lifted_at(t, i_ref):
        """Lifted branch vector at t, anchored at node index i_ref."""
        r, l = _match_lift(raws_chain[i_ref], lifted[i_ref], _phases_of(u_at(t)))
        return l

    raw_times: list[float] = []
    for i in range(len(ts) - 1):
        a, b = ts[i], ts[i + 1]
        la, lb = lifted[i], lifted[i + 1]
        for j in range(n):
            lo_lvl = int(np.ceil((min(la[j], lb[j]) - np.pi) / (2 * np.pi)))
            hi_lvl = int(np.floor((max(la[j], lb[j]) - np.pi) / (2 * np.pi)))
            for lvl in range(lo_lvl, hi_lvl + 1):
                level = np.pi + 2 * np.pi * lvl
                g = lambda t, _j=j, _i=i, _lv=level: float(lifted_at(t, _i)[_j] - _lv)  # noqa: E731
                ga, gb = la[j] - level, lb[j] - level
                if ga == 0.0 or gb == 0.0:
                    raise PreconditionError("grid too coarse")
                if ga * gb > 0.0:
                    continue
                lo, hi, glo = a, b, ga
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    gm = g(mid)
                    if gm == 0.0 or hi - lo < 1e-14:
                        lo = hi = mid
                        break
                    if glo * gm < 0.0:
                        hi = mid
                    else:
                        lo, glo = mid, gm
                raw_times.append(0.5 * (lo + hi))

    times = _merge_times(raw_times, 1e-9)
    jmat = J_matrix(n)
    flow = 0
    crossings: list[Crossing] = []
    for t_star in times:
        if not (0.0 < t_star < 1.0):
            raise PreconditionError("degenerate endpoint")
        frame = path.frame_at(t_star).frame
        kern_coords = numeric_kernel(frame[:n], Tolerance(max(tol.rank_eps, 1e-7),
                                                          tol.crossing_eps))
        if kern_coords.shape[1] == 0:
            continue
        kernel = frame @ kern_coords

        spacing_loc = min(t_star / 2.0, (1.0 - t_star) / 2.0, _FD_STEP)
        p_of = lambda t: path.frame_at(t).projection()  # noqa: E731
        pdot = _richardson_derivative(p_of, t_star, max(spacing_loc, 1e-12))
        rate = -jmat @ pdot
        form = kernel.conj().T @ rate @ kernel
        q = np.linalg.eigvalsh(symmetrize(form))
        if np.min(np.abs(q)) <= tol.crossing_eps:
            raise PreconditionError("degenerate crossing")
        sgn = int(np.sum(q > 0) - np.sum(q < 0))
        crossings.append(Crossing(t_star, sgn))
        flow += sgn
    return flow, crossings
