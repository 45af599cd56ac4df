"""Time evolution and steady states of coefficient states."""

from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .basis import enumerate_basis
from .errors import (ConservationError, ConvergenceError, DegenerateSteadyStateError,
                     InvalidParameterError, NormalizationError, StiffnessError,
                     TruncationError)
from .liouvillian import build_generator, sector_labels
from .state import CoefficientState

__all__ = ["CoefficientState", "EvolveConfig", "initial_state", "product_state",
           "evolve", "sample", "steady_state", "boundary_population", "build_generator"]


@dataclass(frozen=True)
class EvolveConfig:
    t_final: float = 10.0
    dt_init: float = 1e-3
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    trunc_tol: float = 1e-6
    max_steps: int = 1_000_000
    trace_tol: float = 1e-9

    def __post_init__(self):
        if self.t_final < 0:
            raise InvalidParameterError("t_final must be non-negative")
        for name in ("dt_init", "rel_tol", "abs_tol", "trunc_tol", "trace_tol"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive")


def initial_state(kind, p, spin_weights=None, photon_weights=None):
    """Prepare a trace-one state.

    ``all-ground-vacuum`` and ``all-excited-vacuum`` put every atom in ``|0>``
    or ``|1>`` and the cavity in vacuum.  ``custom-diagonal`` takes
    ``spin_weights``, a mapping ``(two_q, two_q3) -> coefficient`` on the
    ``sigma3 = 0`` elements (those diagonal in the collective inversion), and
    ``photon_weights``, a Fock-state distribution (default vacuum).
    """
    table = enumerate_basis(p.N)
    P = p.n_max + 1
    st = CoefficientState(np.zeros((len(table), P, P), complex), table, p.n_max)
    if kind == "all-ground-vacuum":
        st.data[table.lookup(p.N, -p.N, 0), 0, 0] = 1.0
    elif kind == "all-excited-vacuum":
        st.data[table.lookup(p.N, p.N, 0), 0, 0] = 1.0
    elif kind == "custom-diagonal":
        ph = np.zeros(P)
        if photon_weights is None:
            ph[0] = 1.0
        else:
            w = np.asarray(photon_weights, float)
            if w.size > P:
                raise InvalidParameterError(f"{w.size} photon weights for n_max={p.n_max}")
            ph[:w.size] = w
        spin = np.zeros(len(table), complex)
        for (two_q, two_q3), c in (spin_weights or {(p.N, -p.N): 1.0}).items():
            i = table.lookup(two_q, two_q3, 0)
            if i is None:
                raise InvalidParameterError(f"no sigma3=0 basis element with 2q={two_q}, 2q3={two_q3}")
            spin[i] = c
        st.data[:] = spin[:, None, None] * np.diag(ph)[None]
        tr = np.sum(spin[table.trace_indices]) * ph.sum()
        if abs(tr - 1) > 1e-12:
            raise NormalizationError(f"custom-diagonal weights give trace {tr:.6g}, not 1")
    else:
        raise InvalidParameterError(f"unknown initial state kind {kind!r}")
    return st


def product_state(single_atom, photon, n_max):
    """``single_atom`` tensored over all atoms, times a photon density matrix.

    ``single_atom`` is given as ``(N, rho_1)`` with ``rho_1`` the 2x2 matrix in
    the ``[|0>, |1>]`` basis; ``photon`` is an ``(n_max+1)``-square matrix.
    """
    n_atoms, rho1 = single_atom
    rho1 = np.asarray(rho1, complex)
    table = enumerate_basis(n_atoms)
    # weights of u, d, s, c in rho1
    wts = np.array([rho1[1, 1], rho1[0, 0], rho1[1, 0], rho1[0, 1]])
    occ = table.occupations
    counts = np.array([table.arrangements(i) for i in range(len(table))], float)
    spin = counts * np.prod(wts[None, :] ** occ, axis=1)
    photon = np.asarray(photon, complex)
    if photon.shape != (n_max + 1, n_max + 1):
        raise InvalidParameterError(f"photon matrix must be {(n_max + 1,) * 2}")
    return CoefficientState(spin[:, None, None] * photon[None], table, n_max)


def boundary_population(state):
    """Population of the highest retained Fock level."""
    c = state.data[state.basis.trace_indices, state.n_max, state.n_max]
    return float(np.sum(np.abs(c)))


def _trace(state_flat_local, trace_pos):
    return complex(np.sum(state_flat_local[trace_pos]))


# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_E = _B - np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200,
                    187 / 2100, 1 / 40])


class _Integrator:
    """DOPRI5 with a PI step-size controller on ``dy/dt = A y``."""

    beta = 0.04
    alpha = 0.2 - 0.75 * 0.04
    safety = 0.9

    def __init__(self, A, cfg):
        self.A = A
        self.cfg = cfg
        self.h = cfg.dt_init
        self.err_old = 1e-4
        self.k_first = None
        self.steps = 0

    def step_to(self, t, y, t_end, on_step=None):
        cfg, A = self.cfg, self.A
        k = [None] * 7
        k[0] = A @ y if self.k_first is None else self.k_first
        while t < t_end:
            if self.steps >= cfg.max_steps:
                raise StiffnessError(f"step budget of {cfg.max_steps} exhausted at t={t:.6g}")
            h = min(self.h, t_end - t)
            last = h >= t_end - t
            for s in range(1, 7):
                ys = y + h * sum(a * k[j] for j, a in enumerate(_A[s]) if a)
                k[s] = A @ ys
            y_new = ys  # stage 7 point is the 5th-order solution (FSAL)
            err_vec = h * sum(e * k[j] for j, e in enumerate(_E) if e)
            scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            err = np.sqrt(np.mean(np.abs(err_vec / scale) ** 2)) if y.size else 0.0
            if err <= 1.0:
                fac = self.safety * max(err, 1e-10) ** -self.alpha * self.err_old ** self.beta
                fac = min(10.0, max(0.2, fac))
                self.err_old = max(err, 1e-4)
                t = t_end if last else t + h
                y = y_new
                k[0] = k[6]
                self.steps += 1
                if not last or h >= self.h:
                    self.h = h * fac
                if on_step is not None:
                    on_step(t, y)
            else:
                self.h = h * max(0.2, self.safety * err ** -self.alpha)
            if self.h < 1e-13 * max(1.0, abs(t)):
                raise StiffnessError(f"step size underflow (h={self.h:.3e}) at t={t:.6g}")
        self.k_first = k[0]
        return t, y


def _support_sectors(state):
    labels = sector_labels(state.basis, state.n_max)
    return np.unique(labels[np.abs(state.flat) > 0])


def _local_generator(state, L):
    secs = _support_sectors(state)
    if secs.size == 0:
        return None
    return L.restrict(secs)


def evolve(state, L, cfg=None, t_eval=None, observer=None, monitor=True):
    """Integrate ``dv/dt = L v`` for ``cfg.t_final``.

    With ``t_eval`` the integrator lands exactly on those times and
    ``observer(t, state)`` is called at each of them; otherwise the observer
    sees every accepted step.  The truncation monitor checks the photon
    population at ``n_max`` after every step when ``monitor`` is set; with
    ``n_max = 0`` the cavity is clamped to vacuum and there is nothing to check.
    """
    cfg = cfg or EvolveConfig()
    P = state.n_max + 1
    sub = _local_generator(state, L)
    times = np.asarray(t_eval if t_eval is not None else [cfg.t_final], float)
    if np.any(np.diff(times) < 0) or (times.size and times[0] < 0):
        raise InvalidParameterError("t_eval must be non-negative and increasing")
    if sub is None:
        if observer is not None:
            for t in times:
                observer(float(t), state.copy())
        return state.copy()

    idx = sub.indices
    y = state.flat[idx].copy()
    trace_glob = state.basis.trace_indices[:, None] * P * P + np.arange(P) * (P + 1)
    trace_pos = _positions(idx, trace_glob.ravel())
    bnd_pos = _positions(idx, state.basis.trace_indices * P * P + state.n_max * (P + 1))
    tr0 = _trace(y, trace_pos)

    def full(v):
        out = np.zeros(state.flat.size, complex)
        out[idx] = v
        res = state.with_data(out)
        return res

    def check(t, v):
        if monitor and state.n_max > 0 and bnd_pos.size:
            b = float(np.sum(np.abs(v[bnd_pos])))
            if b > cfg.trunc_tol:
                raise TruncationError(state.n_max, b, cfg.trunc_tol)

    def per_step(t, v):
        check(t, v)
        if observer is not None and t_eval is None:
            observer(t, full(v))

    integ = _Integrator(sub.matrix, cfg)
    t = 0.0
    for target in times:
        t, y = integ.step_to(t, y, float(target), per_step)
        if t_eval is not None:
            check(t, y)
            if observer is not None:
                observer(t, full(y))
    drift = abs(_trace(y, trace_pos) - tr0)
    if drift > cfg.trace_tol * max(1.0, abs(tr0)) * max(1.0, t):
        raise ConservationError(f"trace drifted by {drift:.3e} over t={t:.6g}")
    return full(y)


def _positions(sorted_idx, wanted):
    pos = np.searchsorted(sorted_idx, wanted)
    pos = np.minimum(pos, sorted_idx.size - 1)
    return pos[sorted_idx[pos] == wanted]


def sample(state, L, times, fn, cfg=None, monitor=True):
    """``[fn(state(t)) for t in times]`` along one evolution."""
    out = []
    evolve(state, L, cfg, t_eval=times, observer=lambda t, s: out.append(fn(s)), monitor=monitor)
    return out


def residual(L, state):
    """``max|L v| / max|v|``."""
    v = state.flat[L.indices]
    scale = np.max(np.abs(v), initial=0.0)
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(L.matrix @ v), initial=0.0) / scale)


def _hermitize(state):
    return 0.5 * (state + state.adjoint())


def steady_state(L, method="linear-solve", cfg=None, initial=None, solver="direct",
                 check_degeneracy=True, max_chunks=200):
    """Trace-one stationary state of ``L``.

    ``linear-solve`` works in the trace-carrying sector only, replacing one
    equation by ``trace = 1``.  ``long-time`` integrates ``initial`` (default:
    all atoms in the ground state, cavity in vacuum) in chunks of
    ``cfg.t_final`` until the residual falls below ``cfg.abs_tol``; the
    integrator runs at tighter tolerances so that its error stays below it.
    """
    cfg = cfg or EvolveConfig()
    p = L.params
    if not p.is_dissipative:
        raise DegenerateSteadyStateError("no dissipative rate is positive; the stationary state is not unique")
    if method == "linear-solve":
        return _steady_linear(L.restrict([0]), cfg, solver, check_degeneracy)
    if method == "long-time":
        state = initial if initial is not None else initial_state("all-ground-vacuum", p)
        # integration error must sit well below the residual target
        inner = replace(cfg, rel_tol=min(cfg.rel_tol, 1e-2 * cfg.abs_tol),
                        abs_tol=1e-4 * cfg.abs_tol)
        for _ in range(max_chunks):
            state = evolve(state, L, inner)
            if residual(L.restrict(_support_sectors(state)), state) <= cfg.abs_tol:
                return _hermitize(state)
        raise ConvergenceError(
            f"long-time evolution did not reach residual {cfg.abs_tol:.1e} within "
            f"{max_chunks * cfg.t_final:.6g} time units")
    raise InvalidParameterError(f"unknown steady-state method {method!r}")


def _steady_linear(sub, cfg, solver, check_degeneracy):
    basis, nm = sub.basis, sub.n_max
    P = nm + 1
    idx = sub.indices
    trace_glob = (basis.trace_indices[:, None] * P * P + np.arange(P) * (P + 1)).ravel()
    tpos = _positions(idx, trace_glob)
    tvec = np.zeros(idx.size)
    tvec[tpos] = 1.0

    def solve(row):
        A = sub.matrix.tolil(copy=True)
        A[row, :] = tvec[None, :]
        A = A.tocsc()
        b = np.zeros(idx.size, complex)
        b[row] = 1.0
        if solver == "direct":
            try:
                return spla.splu(A).solve(b)
            except RuntimeError as exc:
                raise DegenerateSteadyStateError(f"trace-constrained generator is singular ({exc})") from None
        if solver == "iterative":
            ilu = spla.spilu(A, drop_tol=1e-6, fill_factor=20)
            M = spla.LinearOperator(A.shape, ilu.solve, dtype=complex)
            x, info = spla.gmres(A, b, M=M, rtol=1e-10, atol=0.0, restart=50, maxiter=1000)
            if info != 0:
                raise ConvergenceError(f"GMRES did not converge (info={info})")
            return x
        raise InvalidParameterError(f"unknown solver {solver!r}")

    x = solve(tpos[0])
    if not np.all(np.isfinite(x)):
        raise DegenerateSteadyStateError("steady-state solve produced non-finite values")
    if check_degeneracy and tpos.size > 1:
        x2 = solve(tpos[-1])
        if np.max(np.abs(x - x2)) > 1e-6 * max(1.0, np.max(np.abs(x))):
            raise DegenerateSteadyStateError("stationary state depends on the constraint row: null space is not one-dimensional")
    out = np.zeros(len(basis) * P * P, complex)
    out[idx] = x
    state = _hermitize(CoefficientState(out, basis, nm))
    res = residual(sub, state)
    if res > cfg.abs_tol:
        raise ConvergenceError(f"steady-state residual {res:.3e} exceeds {cfg.abs_tol:.1e}")
    return state
