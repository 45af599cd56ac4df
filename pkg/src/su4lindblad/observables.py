"""Expectation values, regression-theorem correlations and spectra."""

from dataclasses import dataclass

import numpy as np

from .basis import apply_photon, apply_superop
from .dynamics import EvolveConfig, evolve, residual
from .errors import (InvalidParameterError, PreconditionError, UndefinedG2Error,
                     WindowTooShortError)

G2_FLOOR = 1e-8

CORRELATION_KINDS = ("first-order", "second-order", "spin-first", "spin-second")


def trace_of(state):
    """``sum_{m, q3} C^{m,m}_{N/2, q3, 0}``."""
    c = state.data[state.basis.trace_indices]
    return float(np.real(np.einsum("imm->", c)))


def _trace_complex(state):
    return complex(np.einsum("imm->", state.data[state.basis.trace_indices]))


def _lower(state):
    """``J- rho = (M- + N-) rho``."""
    return apply_superop("M-", state) + apply_superop("N-", state)


def _raise(state):
    """``J+ rho = (M+ + N+) rho``."""
    return apply_superop("M+", state) + apply_superop("N+", state)


def _right_raise(state):
    """``rho J+ = (U- + V-) rho``."""
    return apply_superop("U-", state) + apply_superop("V-", state)


@dataclass(frozen=True)
class ObservableReport:
    trace: float
    mean_photon: float
    field_amp: complex
    inversion: float
    spin_plus: complex
    photon_moment2: float
    spin_zz: float | None = None
    spin_corr: complex | None = None
    g2_zero: float = float("nan")

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def photon_distribution(state):
    """``p(n) = sum_{q3} C^{n,n}_{N/2, q3, 0}``."""
    c = state.data[state.basis.trace_indices]
    return np.real(np.einsum("inn->n", c))


def _photon_moments(state):
    p = photon_distribution(state)
    n = np.arange(p.size)
    return float(n @ p), float((n * (n - 1)) @ p)


def g2_zero(state, floor=G2_FLOOR):
    """Normalized zero-delay intensity correlation."""
    n1, n2 = _photon_moments(state)
    if n1 <= floor:
        raise UndefinedG2Error(f"mean photon number {n1:.3e} is below the floor {floor:.1e}")
    return n2 / n1**2


def expectations(state):
    N = state.n_atoms
    n1, n2 = _photon_moments(state)
    field = _trace_complex(apply_photon("left-a", state))
    inversion = 2 * _trace_complex(apply_superop("Q3", state)).real / N
    splus = _trace_complex(_raise(state)) / N
    kw = {}
    if N >= 2:
        q3sq = apply_superop("Q3", apply_superop("Q3", state))
        s3sq = apply_superop("Sigma3", apply_superop("Sigma3", state))
        kw["spin_zz"] = (4 * _trace_complex(q3sq - s3sq).real - N) / (N * (N - 1))
        pair = apply_superop("V-", _lower(state)) - apply_superop("Q-", state)
        kw["spin_corr"] = _trace_complex(pair) / (N * (N - 1))
    g2 = n2 / n1**2 if n1 > G2_FLOOR else float("nan")
    return ObservableReport(trace=trace_of(state), mean_photon=n1, field_amp=field,
                            inversion=inversion, spin_plus=splus, photon_moment2=n2,
                            g2_zero=g2, **kw)


@dataclass(frozen=True)
class CorrelationSeries:
    tau_grid: np.ndarray
    values: np.ndarray
    kind: str


def correlation(state_ss, L, kind, tau_grid, cfg=None, stationarity_tol=1e-7):
    """Two-time correlation at stationarity from the quantum regression theorem.

    ============  ==============================================  ==================
    kind          quantity                                        evolved object
    ============  ==============================================  ==================
    first-order   <a^dag(t+tau) a(t)>                             a rho
    second-order  <a^dag(t) a^dag(t+tau) a(t+tau) a(t)>           a rho a^dag
    spin-first    sum_jk <s+_j(t+tau) s-_k(t)>                    J- rho
    spin-second   sum <s+_j(t) s+_j'(t+tau) s-_k(t+tau) s-_k'(t)>  J- rho J+
    ============  ==============================================  ==================

    The evolved object is not renormalized.
    """
    tau = np.asarray(tau_grid, float)
    if tau.ndim != 1 or tau.size < 2 or tau[0] != 0:
        raise InvalidParameterError("tau_grid must be 1-D, start at 0 and have at least two points")
    steps = np.diff(tau)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * tau[-1]:
        raise InvalidParameterError("tau_grid must be uniform and increasing")
    res = residual(L.restrict([0]), state_ss)
    if res > stationarity_tol:
        raise PreconditionError(f"state is not stationary: residual {res:.3e} > {stationarity_tol:.1e}")

    if kind == "first-order":
        x0 = apply_photon("left-a", state_ss)
        measure = lambda x: _trace_complex(apply_photon("left-adag", x))  # noqa: E731
    elif kind == "second-order":
        x0 = apply_photon("right-adag", apply_photon("left-a", state_ss))
        measure = lambda x: _trace_complex(apply_photon("left-adag", apply_photon("left-a", x)))  # noqa: E731
    elif kind == "spin-first":
        x0 = _lower(state_ss)
        measure = lambda x: _trace_complex(_raise(x))  # noqa: E731
    elif kind == "spin-second":
        x0 = _right_raise(_lower(state_ss))
        measure = lambda x: _trace_complex(apply_superop("V-", _lower(x)))  # noqa: E731
    else:
        raise InvalidParameterError(f"unknown correlation kind {kind!r}; expected one of {CORRELATION_KINDS}")
    values = []
    evolve(x0, L, cfg or EvolveConfig(rel_tol=1e-10, abs_tol=1e-13), t_eval=tau,
           observer=lambda t, x: values.append(measure(x)), monitor=False)
    values = np.array(values)
    if kind in ("second-order", "spin-second"):
        values[0] = values[0].real
    return CorrelationSeries(tau, values, kind)


def spectrum(series, normalize=True, pad_factor=8, decay_tol=1e-3):
    """Power spectrum of a stationary first-order correlation.

    Uses the two-sided extension ``g(-tau) = conj(g(tau))`` and
    ``S(omega) = sum_j dtau g(tau_j) exp(-i omega tau_j)``; with
    ``normalize=False`` the output satisfies
    ``sum S(omega_k) domega / (2 pi) = g(0)``.
    """
    g = np.asarray(series.values, complex)
    tau = np.asarray(series.tau_grid, float)
    if abs(g[-1]) > decay_tol * abs(g[0]):
        raise WindowTooShortError(
            f"|g(tau_max)|/|g(0)| = {abs(g[-1]) / abs(g[0]):.2e} > {decay_tol:.0e}; increase tau_max")
    dt = tau[1] - tau[0]
    M = g.size
    L = 2 * M - 1
    n_fft = int(2 ** np.ceil(np.log2(pad_factor * L)))
    x = np.zeros(n_fft, complex)
    x[:M] = g
    x[n_fft - M + 1:] = np.conj(g[1:][::-1])
    S = dt * np.fft.fft(x)
    omega = 2 * np.pi * np.fft.fftfreq(n_fft, d=dt)
    order = np.argsort(omega)
    omega, S = omega[order], S[order].real
    if normalize:
        S = S / np.max(S)
    return omega, S


def fwhm(omega, power):
    """Full width at half maximum of a single-peaked spectrum by linear interpolation."""
    omega = np.asarray(omega, float)
    power = np.asarray(power, float)
    k = int(np.argmax(power))
    half = power[k] / 2
    i = k
    while i > 0 and power[i] > half:
        i -= 1
    j = k
    while j < power.size - 1 and power[j] > half:
        j += 1
    if power[i] > half or power[j] > half:
        raise WindowTooShortError("spectrum does not fall to half maximum inside the frequency grid")
    left = np.interp(half, [power[i], power[i + 1]], [omega[i], omega[i + 1]])
    right = np.interp(half, [power[j], power[j - 1]], [omega[j], omega[j - 1]])
    return float(right - left)
