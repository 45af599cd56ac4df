"""Side-by-side comparison of the symmetric-basis solver with the full-space oracle."""

from dataclasses import replace

import numpy as np

from .dynamics import EvolveConfig, evolve, product_state, steady_state
from .errors import TruncationError
from .liouvillian import ModelParams, build_generator
from .observables import correlation, expectations, trace_of
from .oracle import OracleModel, product_state_full, to_full
from .projection import entropy, project_blocks, purity

SCALAR_KEYS = ("trace", "mean_photon", "field_amp", "inversion", "spin_plus",
               "photon_moment2", "spin_zz", "spin_corr")


def random_params(rng, N, n_max):
    """Rates uniform in [0, 5], coupling in [0, 2], detuning in [-1, 1]."""
    kappa, gamma, w, deph = (float(x) for x in rng.uniform(0, 5, size=4))
    return ModelParams(N=N, delta=float(rng.uniform(-1, 1)), omega=float(rng.uniform(0, 2)), kappa=kappa,
                       gamma_decay=gamma, w=w, dephasing=deph, n_max=n_max)


def random_density(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _g2(n1, n2, floor=1e-8):
    return n2 / n1**2 if n1 > floor else None


def _compare_state(state, rho, model, dev, tag):
    mine = expectations(state).as_dict()
    ref = model.observables(rho)
    for k in SCALAR_KEYS:
        if k in ref:
            dev[f"{tag}:{k}"] = abs(complex(mine[k]) - complex(ref[k]))
    g_mine = _g2(mine["mean_photon"], mine["photon_moment2"])
    g_ref = _g2(ref["mean_photon"], ref["photon_moment2"])
    if g_mine is not None and g_ref is not None:
        dev[f"{tag}:g2_zero"] = abs(g_mine - g_ref)
    blocks = project_blocks(state)
    dev[f"{tag}:purity"] = abs(purity(blocks) - ref["purity"])
    dev[f"{tag}:entropy"] = abs(entropy(blocks) - ref["entropy"])
    dev[f"{tag}:density_matrix"] = float(np.max(np.abs(to_full(state) - rho)))


def compare(params, rng, t_transient=1.0, tau_max=5.0, n_tau=20, cfg=None):
    """Maximum absolute deviations per quantity, plus conservation diagnostics.

    Compares the steady state, a transient from a random product state and
    the first-order correlation ``g1(tau)`` of the steady state.  Returns
    ``(deviations, diagnostics)``; ``diagnostics`` lists, for each sampled
    evolved state, its trace error and Hermiticity residual, and records
    whether the truncation monitor stayed below its tolerance or raised.
    """
    cfg = cfg or EvolveConfig(rel_tol=1e-11, abs_tol=1e-13)
    model = OracleModel(params)
    L = build_generator(params)
    dev, diag = {}, {"trace_error": [], "hermiticity": [], "truncation": []}

    ss = steady_state(L)
    rho_ss = model.steady()
    _compare_state(ss, rho_ss, model, dev, "steady")

    rho1 = random_density(rng, 2)
    photon = random_density(rng, params.n_max + 1)
    st0 = product_state((params.N, rho1), photon, params.n_max)
    times = np.linspace(0.0, t_transient, 5)

    def record(t, s):
        diag["trace_error"].append(abs(trace_of(s) - 1.0))
        diag["hermiticity"].append(s.hermiticity_residual())

    try:
        evolve(st0, L, replace(cfg, t_final=t_transient), monitor=True)
        diag["truncation"].append("below tolerance")
    except TruncationError as exc:
        diag["truncation"].append(f"aborted: {exc}")
    st_t = evolve(st0, L, cfg, t_eval=times, observer=record, monitor=False)
    rho_t = model.evolve(product_state_full(rho1, photon, params.N), t_transient, tol=1e-10)
    _compare_state(st_t, rho_t, model, dev, "transient")

    taus = np.linspace(0.0, tau_max, n_tau)
    g1 = correlation(ss, L, "first-order", taus, cfg=cfg).values
    g1_ref = model.correlation(rho_ss, "first-order", taus)
    dev["g1"] = float(np.max(np.abs(g1 - g1_ref)))
    return dev, diag


def oracle_check(N, seed, n_max=3):
    """Deviations for one random parameter set; see :func:`compare`."""
    rng = np.random.default_rng(seed)
    params = random_params(rng, N, n_max)
    dev, _ = compare(params, rng)
    return params, dev
