"""Sparse generator of the Tavis-Cummings master equation in the SU(4) basis.

The generator acts on the flattened coefficient vector of a
:class:`~su4lindblad.state.CoefficientState`.  It is the sum of

* the coherent part ``-2i delta Sigma3`` plus the photon-assisted ladder terms
  ``-i omega [a (M+ + N+) rho + a^dag (M- + N-) rho]``
  ``+i omega [(U+ + V+) rho a^dag + (U- + V-) rho a]``,
* cavity loss ``kappa D[a]``,
* atomic decay ``gamma (Q- - Q3 - N/2)``, pumping ``w (Q+ + Q3 - N/2)`` and
  dephasing ``rate (4 M3 - 2 Q3 - 2 Sigma3 - N)``.

Every term conserves ``two_s3 + m - n`` (the excitation-number difference
between the two sides of the density operator), so the generator is block
diagonal in that *sector* label and can be assembled on a subset of sectors.
"""

from dataclasses import dataclass, fields

import numpy as np
import scipy.sparse as sp

from .basis import enumerate_basis
from .errors import CapacityError, InvalidParameterError, ShapeError
from .state import CoefficientState

# default assembly budget, in bytes of CSR storage
MEMORY_BUDGET = 2 * 1024**3
_ENTRIES_PER_COLUMN = 12
_BYTES_PER_ENTRY = 16 + 8


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters.  Rates are angular frequencies; ``dephasing = 1/(2 T2)``."""

    N: int
    delta: float = 0.0
    omega: float = 0.0
    kappa: float = 0.0
    gamma_decay: float = 0.0
    w: float = 0.0
    dephasing: float = 0.0
    n_max: int = 0

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise InvalidParameterError(f"N must be a positive integer, got {self.N!r}")
        if not isinstance(self.n_max, (int, np.integer)) or self.n_max < 0:
            raise InvalidParameterError(f"n_max must be a non-negative integer, got {self.n_max!r}")
        for name in ("kappa", "gamma_decay", "w", "dephasing"):
            val = getattr(self, name)
            if not np.isfinite(val) or val < 0:
                raise InvalidParameterError(f"{name} must be a non-negative rate, got {val!r}")
        for name in ("delta", "omega"):
            if not np.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")

    @classmethod
    def field_names(cls):
        return tuple(f.name for f in fields(cls))

    def replace(self, **changes):
        kw = {f: getattr(self, f) for f in self.field_names()}
        kw.update(changes)
        return ModelParams(**kw)

    @property
    def is_dissipative(self):
        return any(getattr(self, r) > 0 for r in ("kappa", "gamma_decay", "w", "dephasing"))


def state_dimension(n_atoms, n_max):
    return (n_atoms + 1) * (n_atoms + 2) * (n_atoms + 3) // 6 * (n_max + 1) ** 2


def sector_labels(basis, n_max):
    """Conserved ``two_s3 + m - n`` for every flattened coefficient index."""
    p = n_max + 1
    mn = np.subtract.outer(np.arange(p), np.arange(p))
    return (basis.two_s3[:, None, None] + mn[None]).reshape(-1)


def trace_vector(basis, n_max):
    """Trace functional as a dense vector over flattened indices."""
    p = n_max + 1
    t = np.zeros((len(basis), p, p))
    t[basis.trace_indices] = np.eye(p)
    return t.reshape(-1)


@dataclass(eq=False)
class SparseGenerator:
    """Generator assembled on the flattened indices ``indices`` (sorted).

    ``matrix`` is expressed in local coordinates: entry ``(r, c)`` couples
    global index ``indices[c]`` into ``indices[r]``.
    """

    params: ModelParams
    matrix: sp.csr_matrix
    indices: np.ndarray
    basis: object
    sectors: tuple

    @property
    def n_max(self):
        return self.params.n_max

    @property
    def dimension(self):
        return state_dimension(self.params.N, self.params.n_max)

    @property
    def is_full(self):
        return len(self.indices) == self.dimension

    def restrict(self, sectors):
        """Sub-generator on a subset of this generator's sectors (cached)."""
        key = tuple(sorted(set(int(s) for s in sectors)))
        cache = self.__dict__.setdefault("_restricted", {})
        if key not in cache:
            missing = set(key) - set(self.sectors)
            if missing:
                raise InvalidParameterError(f"generator was not assembled on sectors {sorted(missing)}")
            lab = sector_labels(self.basis, self.n_max)[self.indices]
            local = np.flatnonzero(np.isin(lab, key))
            cache[key] = SparseGenerator(self.params, self.matrix[local][:, local].tocsr(),
                                         self.indices[local], self.basis, key)
        return cache[key]


def build_generator(p, sectors=None, memory_budget=MEMORY_BUDGET):
    """Assemble the generator for ``p``, optionally only on the given sectors."""
    basis = enumerate_basis(p.N)
    nm = p.n_max
    P = nm + 1
    all_sectors = sector_labels(basis, nm)
    if sectors is None:
        cols = np.arange(all_sectors.size)
        sectors = tuple(range(-p.N - nm, p.N + nm + 1))
    else:
        sectors = tuple(sorted(set(int(s) for s in sectors)))
        cols = np.flatnonzero(np.isin(all_sectors, sectors))
    need = cols.size * _ENTRIES_PER_COLUMN * _BYTES_PER_ENTRY
    if need > memory_budget:
        raise CapacityError(
            f"generator on {cols.size} coefficients needs about {need / 2**30:.1f} GiB "
            f"(budget {memory_budget / 2**30:.1f} GiB)"
        )

    spin, rem = np.divmod(cols, P * P)
    m, n = np.divmod(rem, P)
    rows_l, cols_l, vals_l = [], [], []

    def emit(mask, dst_spin, dm, dn, val):
        r = dst_spin * P * P + (m[mask] + dm) * P + (n[mask] + dn)
        rows_l.append(r)
        cols_l.append(np.flatnonzero(mask))
        vals_l.append(np.broadcast_to(np.asarray(val, complex), r.shape))

    def ladder(op, photon_mask, dm, dn, coeff):
        """Spin ladder ``op`` paired with a photon shift of (dm, dn)."""
        src, dst, fac = basis.ladder_map(op)
        lut_dst = np.full(len(basis), -1)
        lut_fac = np.zeros(len(basis))
        lut_dst[src] = dst
        lut_fac[src] = fac
        ok = (lut_dst[spin] >= 0) & photon_mask
        ph = 1.0
        if dm == -1:
            ph = np.sqrt(m[ok])
        elif dm == 1:
            ph = np.sqrt(m[ok] + 1)
        if dn == -1:
            ph = ph * np.sqrt(n[ok])
        elif dn == 1:
            ph = ph * np.sqrt(n[ok] + 1)
        emit(ok, lut_dst[spin[ok]], dm, dn, coeff * lut_fac[spin[ok]] * ph)

    N = p.N
    q3 = basis.two_q3[spin] / 2
    s3 = basis.two_s3[spin] / 2
    m3 = basis.doubled[spin, 5] / 2
    diag = (-2j * p.delta * s3
            - 0.5 * p.kappa * (m + n)
            + p.gamma_decay * (-N / 2 - q3)
            + p.w * (-N / 2 + q3)
            + p.dephasing * (4 * m3 - 2 * q3 - 2 * s3 - N))
    everywhere = np.ones(cols.size, bool)
    emit(everywhere, spin, 0, 0, diag)

    if p.gamma_decay:
        ladder(("Q", "-"), everywhere, 0, 0, p.gamma_decay)
    if p.w:
        ladder(("Q", "+"), everywhere, 0, 0, p.w)
    if p.kappa:
        ok = (m > 0) & (n > 0)
        emit(ok, spin[ok], -1, -1, p.kappa * np.sqrt(m[ok] * n[ok]))
    if p.omega:
        g = p.omega
        for fam in ("M", "N"):
            ladder((fam, "+"), m > 0, -1, 0, -1j * g)
            ladder((fam, "-"), m < nm, 1, 0, -1j * g)
        for fam in ("U", "V"):
            ladder((fam, "+"), n > 0, 0, -1, 1j * g)
            ladder((fam, "-"), n < nm, 0, 1, 1j * g)

    rows = np.concatenate(rows_l)
    local_cols = np.concatenate(cols_l)
    vals = np.concatenate(vals_l)
    keep = vals != 0
    local_rows = np.searchsorted(cols, rows[keep])
    if np.any(cols[np.minimum(local_rows, cols.size - 1)] != rows[keep]):
        raise AssertionError("generator coupled different sectors")
    mat = sp.csr_matrix((vals[keep], (local_rows, local_cols[keep])), shape=(cols.size, cols.size))
    mat.sum_duplicates()
    mat.sort_indices()
    return SparseGenerator(p, mat, cols, basis, sectors)


def apply(L, v):
    """Generator applied to a state (or to a flat array over ``L.indices``)."""
    if isinstance(v, CoefficientState):
        if v.flat.size != L.dimension or v.n_max != L.n_max or v.n_atoms != L.params.N:
            raise ShapeError("state and generator dimensions differ")
        out = np.zeros(L.dimension, complex)
        out[L.indices] = L.matrix @ v.flat[L.indices]
        return v.with_data(out)
    v = np.asarray(v)
    if v.shape[0] != L.matrix.shape[1]:
        raise ShapeError(f"vector of length {v.shape[0]} for generator of size {L.matrix.shape[1]}")
    return L.matrix @ v
