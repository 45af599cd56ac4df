"""Projection onto the block-diagonal collective-spin ``|S, M>`` representation.

For a permutation-symmetric operator every matrix element
``<S, M| rho |S, M'>`` is a linear functional of the coefficients
``C_{q, q3, s3}`` with ``q3 = (M + M')/2`` and ``s3 = (M - M')/2``.  The
functionals are built once per atom number:

* the corner of the ``S = N/2`` layer is ``C_{N/2, N/2, 0}``;
* the corner ``<S, S|rho|S, S>`` of every higher layer follows from the
  population identity ``sum_{S' >= S} n_{S'} <S', S|rho|S', S> = C_{N/2, S, 0}``;
* rows are filled with ``rho J- = (U+ + V+) rho`` and columns with
  ``J+ rho = (M+ + N+) rho`` (or, optionally, by Hermiticity).
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .basis import enumerate_basis
from .errors import PreconditionError, UnphysicalStateError

UNPHYSICAL_TOL = 1e-6


@lru_cache(maxsize=None)
def _pascal_rows(n_atoms):
    """Half-Pascal recursion; row ``k`` maps ``two_S -> n_S`` for ``k`` spins."""
    rows = [{0: 1}]
    for _ in range(n_atoms):
        prev, row = rows[-1], {}
        for two_s, cnt in prev.items():
            for t in (two_s + 1, two_s - 1):
                if t >= 0:
                    row[t] = row.get(t, 0) + cnt
        rows.append(row)
    return tuple(rows)


def multiplicities(n_atoms):
    """``{two_S: n_S}`` for ``S = N/2, N/2 - 1, ...`` (descending)."""
    row = _pascal_rows(n_atoms)[n_atoms]
    return {t: row[t] for t in sorted(row, reverse=True)}


@dataclass(frozen=True)
class SpinLayer:
    two_s: int
    multiplicity: int
    # sparse (2S+1)^2 x K functional matrix: row (a, b) with M = S - a, M' = S - b
    functionals: sp.csr_matrix

    @property
    def size(self):
        return self.two_s + 1


class _Functional(dict):
    """Sparse linear form over basis indices."""

    def pull(self, maps):
        """Compose with the sum of ladder maps: ``f -> f o (sum op)``."""
        out = _Functional()
        for dst, w in self.items():
            for inv_src, inv_fac in maps:
                s = inv_src[dst]
                if s >= 0:
                    out[s] = out.get(s, 0.0) + w * inv_fac[dst]
        return out

    def scaled(self, c):
        return _Functional({k: v * c for k, v in self.items()})


def _inverse(table, op):
    src, dst, fac = table.ladder_map(op)
    inv_src = np.full(len(table), -1)
    inv_fac = np.zeros(len(table))
    inv_src[dst] = src
    inv_fac[dst] = fac
    return inv_src, inv_fac


@lru_cache(maxsize=None)
def layer_functionals(n_atoms, fill="ladder"):
    """Linear forms giving every ``D_{S, M, M'}`` from the coefficients."""
    table = enumerate_basis(n_atoms)
    right = [_inverse(table, op) for op in ("U+", "V+")]
    left = [_inverse(table, op) for op in ("M+", "N+")]
    flip = [table.lookup(q, q3, -s3) for q, q3, s3 in zip(table.two_q, table.two_q3, table.two_s3)]
    mult = multiplicities(n_atoms)
    forms = {}  # (two_s, two_M, two_Mp) -> _Functional
    layers = []
    for two_s, n_s in mult.items():
        corner = _Functional({table.lookup(n_atoms, two_s, 0): 1.0})
        for two_sp in (t for t in mult if t > two_s):
            for k, v in forms[(two_sp, two_s, two_s)].items():
                corner[k] = corner.get(k, 0.0) - mult[two_sp] * v
        corner = corner.scaled(1.0 / n_s)
        forms[(two_s, two_s, two_s)] = corner
        ms = list(range(two_s, -two_s - 1, -2))
        S = two_s / 2
        if fill == "ladder":
            # first column with J+ rho
            for a in range(1, len(ms)):
                c = np.sqrt((S + ms[a - 1] / 2) * (S - ms[a - 1] / 2 + 1))
                forms[(two_s, ms[a], two_s)] = forms[(two_s, ms[a - 1], two_s)].pull(left).scaled(1 / c)
        elif fill == "hermitian":
            # first row with rho J-, first column as its Hermitian mirror (sigma3 -> -sigma3)
            for b in range(1, len(ms)):
                c = np.sqrt((S + ms[b - 1] / 2) * (S - ms[b - 1] / 2 + 1))
                forms[(two_s, two_s, ms[b])] = forms[(two_s, two_s, ms[b - 1])].pull(right).scaled(1 / c)
            for a in range(1, len(ms)):
                forms[(two_s, ms[a], two_s)] = _Functional(
                    {flip[k]: v for k, v in forms[(two_s, two_s, ms[a])].items()})
        else:
            raise ValueError(f"unknown fill {fill!r}")
        for a, tm in enumerate(ms):
            for b in range(1, len(ms)):
                if (two_s, tm, ms[b]) in forms:
                    continue
                c = np.sqrt((S + ms[b - 1] / 2) * (S - ms[b - 1] / 2 + 1))
                forms[(two_s, tm, ms[b])] = forms[(two_s, tm, ms[b - 1])].pull(right).scaled(1 / c)
        d = len(ms)
        rows, cols, vals = [], [], []
        for a in range(d):
            for b in range(d):
                f = forms.get((two_s, ms[a], ms[b]))
                if f is None:
                    continue
                for k, v in f.items():
                    if v != 0.0:
                        rows.append(a * d + b)
                        cols.append(k)
                        vals.append(v)
        mat = sp.csr_matrix((vals, (rows, cols)), shape=(d * d, len(table)))
        layers.append(SpinLayer(two_s, n_s, mat))
    return tuple(layers)


@dataclass(frozen=True)
class BlockDensity:
    """Per-``S`` blocks over the combined ``(M, photon)`` index.

    ``blocks[two_S][(a, m), (b, n)] = D^{m,n}_{S, S-a, S-b}``.
    """

    n_atoms: int
    n_max: int
    blocks: dict
    multiplicity: dict

    def spin_block(self, two_s, m=0, n=0):
        """``(2S+1)``-square matrix ``D^{m,n}_{S, M, M'}`` for one photon pair."""
        P = self.n_max + 1
        d = two_s + 1
        return self.blocks[two_s].reshape(d, P, d, P)[:, m, :, n]

    def eigenvalues(self):
        """``{two_S: sorted eigenvalues}``; each occurs ``n_S`` times in ``rho``."""
        return {t: np.linalg.eigvalsh(0.5 * (b + b.conj().T)) for t, b in self.blocks.items()}

    def full_spectrum(self):
        ev = self.eigenvalues()
        return np.sort(np.concatenate([np.repeat(ev[t], self.multiplicity[t]) for t in ev]))

    def total_trace(self):
        return float(sum(self.multiplicity[t] * np.trace(b).real for t, b in self.blocks.items()))


def project_blocks(state, fill="ladder", hermiticity_tol=1e-8):
    """Block-diagonal ``|S, M>`` form of a Hermitian coefficient state."""
    res = state.hermiticity_residual()
    if res > hermiticity_tol * max(1.0, np.max(np.abs(state.data))):
        raise PreconditionError(f"state is not Hermitian (residual {res:.3e})")
    N, P = state.n_atoms, state.n_max + 1
    C = state.data.reshape(len(state.basis), P * P)
    blocks, mult = {}, {}
    for layer in layer_functionals(N, fill):
        d = layer.size
        D = (layer.functionals @ C).reshape(d, d, P, P)
        blocks[layer.two_s] = D.transpose(0, 2, 1, 3).reshape(d * P, d * P)
        mult[layer.two_s] = layer.multiplicity
    return BlockDensity(N, state.n_max, blocks, mult)


def purity(blocks):
    return float(sum(blocks.multiplicity[t] * np.real(np.vdot(b.conj().T, b))
                     for t, b in blocks.blocks.items()))


def entropy(blocks):
    """Von Neumann entropy ``-sum n_S lambda ln lambda``."""
    total = 0.0
    for t, ev in blocks.eigenvalues().items():
        if np.any(ev < -UNPHYSICAL_TOL):
            raise UnphysicalStateError(f"eigenvalue {ev.min():.3e} in the S={t / 2} block")
        ev = np.where(ev < 0, 0.0, ev)  # clamp round-off negatives
        pos = ev[ev > 0]
        total -= blocks.multiplicity[t] * float(np.sum(pos * np.log(pos)))
    return total


def sm_populations(blocks):
    """``{(two_S, two_M): n_S sum_m D^{m,m}_{S,M,M}}``."""
    P = blocks.n_max + 1
    out = {}
    for t, b in blocks.blocks.items():
        d = t + 1
        diag = np.real(np.diag(b)).reshape(d, P).sum(axis=1)
        for a in range(d):
            out[(t, t - 2 * a)] = blocks.multiplicity[t] * float(diag[a])
    return out
