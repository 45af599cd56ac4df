"""Brute-force reference in the full ``2^N (n_max+1)`` Hilbert space.

Nothing here uses the symmetric-basis action rules: operators are built
from per-atom Pauli matrices and the master equation is integrated with a
fixed-step RK4 scheme.  The only bridge to the reduced representation is
:func:`to_full` / :func:`from_full`, which follow directly from the
definition of the symmetrized basis elements.
"""

from functools import reduce
from itertools import permutations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .basis import enumerate_basis
from .errors import CapacityError, ConvergenceError
from .state import CoefficientState

DEFAULT_CAP = 4096

# single-atom operators on [|0>, |1>]  (|1> excited)
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)


def _kron(*ops):
    return reduce(np.kron, ops)


def destroy(n_max):
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), 1).astype(complex)


class OracleModel:
    """Full-space operators and Lindblad generator for one parameter set."""

    def __init__(self, params, cap=DEFAULT_CAP):
        self.params = params
        N, P = params.N, params.n_max + 1
        self.dim = 2**N * P
        if self.dim > cap:
            raise CapacityError(f"full Hilbert space dimension {self.dim} exceeds oracle cap {cap}")
        eye2, eyep = np.eye(2), np.eye(P)

        def atom(op, j):
            parts = [eye2] * N
            parts[j] = op
            return _kron(*parts, eyep)

        self.sp = [atom(SIGMA_PLUS, j) for j in range(N)]
        self.sm = [atom(SIGMA_MINUS, j) for j in range(N)]
        self.sz = [atom(SIGMA_Z, j) for j in range(N)]
        self.a = _kron(np.eye(2**N), destroy(params.n_max))
        self.ad = self.a.conj().T
        Jm = sum(self.sm)
        self.H = (params.delta / 2) * sum(self.sz) + params.omega * (self.ad @ Jm + self.a @ Jm.conj().T)
        self.jumps = [(params.kappa, self.a)]
        for j in range(N):
            self.jumps += [(params.gamma_decay, self.sm[j]), (params.w, self.sp[j]),
                           (params.dephasing, self.sz[j])]
        self.jumps = [(r, op) for r, op in self.jumps if r > 0]
        self._heff = self.H - 0.5j * sum((r * op.conj().T @ op for r, op in self.jumps),
                                         np.zeros_like(self.H))

    def rhs(self, rho):
        out = -1j * (self._heff @ rho - rho @ self._heff.conj().T)
        for r, op in self.jumps:
            out += r * (op @ rho @ op.conj().T)
        return out

    def liouvillian(self):
        """Sparse superoperator acting on row-major ``rho.reshape(-1)``."""
        eye = sp.identity(self.dim, format="csr")
        h = sp.csr_matrix(self._heff)
        L = -1j * (sp.kron(h, eye) - sp.kron(eye, h.conj()))
        for r, op in self.jumps:
            o = sp.csr_matrix(op)
            L = L + r * sp.kron(o, o.conj())
        return L.tocsr()

    def _rk4(self, rho, t, steps):
        if getattr(self, "_L", None) is None:
            self._L = self.liouvillian()
        L, h = self._L, t / steps
        v = np.asarray(rho, complex).reshape(-1)
        for _ in range(steps):
            k1 = L @ v
            k2 = L @ (v + 0.5 * h * k1)
            k3 = L @ (v + 0.5 * h * k2)
            k4 = L @ (v + h * k3)
            v = v + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        return v.reshape(self.dim, self.dim)

    def evolve(self, rho, t, dt=0.02, tol=1e-9, max_halvings=12):
        """Propagate ``rho`` by ``t``, halving the RK4 step until converged."""
        if t == 0:
            return np.array(rho, complex)
        steps = max(1, int(np.ceil(t / dt)))
        prev = self._rk4(rho, t, steps)
        for _ in range(max_halvings):
            steps *= 2
            cur = self._rk4(rho, t, steps)
            if np.max(np.abs(cur - prev)) <= tol:
                return cur
            prev = cur
        raise ConvergenceError("oracle RK4 did not converge under step halving")

    def propagate_grid(self, rho, times, dt=0.02, tol=1e-9):
        """States at each of the increasing ``times`` starting from ``times[0] = 0``."""
        out, cur, t_prev = [], np.array(rho, complex), 0.0
        for t in times:
            cur = self.evolve(cur, t - t_prev, dt=dt, tol=tol)
            t_prev = t
            out.append(cur)
        return out

    def steady(self):
        L = self.liouvillian().tolil()
        d = self.dim
        L[0, :] = np.eye(d).reshape(1, -1)
        b = np.zeros(d * d, complex)
        b[0] = 1.0
        x = spla.spsolve(L.tocsc(), b)
        rho = x.reshape(d, d)
        return 0.5 * (rho + rho.conj().T)

    def observables(self, rho):
        return oracle_observables(self, rho)

    def correlation(self, rho, kind, taus, dt=0.02, tol=1e-10):
        a, ad = self.a, self.ad
        Jm = sum(self.sm)
        Jp = Jm.conj().T
        if kind == "first-order":
            x0, meas = a @ rho, ad
        elif kind == "second-order":
            x0, meas = a @ rho @ ad, ad @ a
        elif kind == "spin-first":
            x0, meas = Jm @ rho, Jp
        elif kind == "spin-second":
            x0, meas = Jm @ rho @ Jp, Jp @ Jm
        else:
            raise ValueError(kind)
        return np.array([np.trace(meas @ x) for x in self.propagate_grid(x0, taus, dt, tol)])


def oracle_generator(params, cap=DEFAULT_CAP):
    return OracleModel(params, cap).liouvillian()


def oracle_observables(model, rho):
    """Observables of a full density matrix, averaged over atom indices."""
    N = model.params.N
    tr = lambda op: complex(np.trace(op @ rho))  # noqa: E731
    a, ad = model.a, model.ad
    n_op = ad @ a
    res = {
        "trace": tr(np.eye(model.dim)).real,
        "mean_photon": tr(n_op).real,
        "field_amp": tr(a),
        "inversion": np.mean([tr(z).real for z in model.sz]),
        "spin_plus": np.mean([tr(s) for s in model.sp]),
        "photon_moment2": tr(ad @ ad @ a @ a).real,
    }
    if N >= 2:
        pairs = [(j, k) for j in range(N) for k in range(N) if j != k]
        res["spin_zz"] = np.mean([tr(model.sz[j] @ model.sz[k]).real for j, k in pairs])
        res["spin_corr"] = np.mean([tr(model.sp[j] @ model.sm[k]) for j, k in pairs])
    evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    res["eigenvalues"] = evals
    res["purity"] = float(np.real(np.trace(rho @ rho)))
    pos = evals[evals > 1e-300]
    res["entropy"] = float(-np.sum(pos * np.log(pos)))
    P = model.params.n_max + 1
    diag = np.real(np.diag(rho)).reshape(2**N, P)
    res["photon_distribution"] = diag.sum(axis=0)
    return res


def oracle_spectrum_of_rho(rho):
    return np.sort(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)))


def _label_map(n_atoms):
    """Basis index and arrangement count for every spin matrix entry (i, j)."""
    table = enumerate_basis(n_atoms)
    D = 2**n_atoms
    bits = (np.arange(D)[:, None] >> np.arange(n_atoms - 1, -1, -1)) & 1  # atom 0 = most significant
    bi = bits[:, None, :]
    bj = bits[None, :, :]
    alpha = np.sum(bi & bj, axis=2)
    beta = np.sum((1 - bi) & (1 - bj), axis=2)
    gamma = np.sum(bi & (1 - bj), axis=2)
    delta = np.sum((1 - bi) & bj, axis=2)
    idx = np.empty((D, D), dtype=np.int64)
    for i in range(D):
        for j in range(D):
            idx[i, j] = table.index[(alpha[i, j], beta[i, j], gamma[i, j], delta[i, j])]
    counts = np.array([table.arrangements(k) for k in range(len(table))], dtype=float)
    return table, idx, counts


def to_full(state):
    """Dense ``2^N (n_max+1)`` density matrix of a coefficient state."""
    N, P = state.n_atoms, state.n_max + 1
    _, idx, counts = _label_map(N)
    D = 2**N
    blocks = state.data[idx] / counts[idx][:, :, None, None]  # (D, D, P, P)
    return blocks.transpose(0, 2, 1, 3).reshape(D * P, D * P)


def from_full(rho, n_atoms, n_max, symmetrize=True):
    """Coefficients of a permutation-symmetric full operator."""
    table, idx, counts = _label_map(n_atoms)
    D, P = 2**n_atoms, n_max + 1
    r = np.asarray(rho, complex).reshape(D, P, D, P).transpose(0, 2, 1, 3)
    data = np.zeros((len(table), P, P), complex)
    hits = np.zeros(len(table))
    np.add.at(data, idx.ravel(), r.reshape(D * D, P, P))
    np.add.at(hits, idx.ravel(), 1.0)
    data /= hits[:, None, None]
    data *= counts[:, None, None]
    return CoefficientState(data, table, n_max)


def permute_atoms(rho, perm, n_atoms, n_max):
    """Relabel atoms: atom ``j`` of the result is atom ``perm[j]`` of ``rho``."""
    D, P = 2**n_atoms, n_max + 1
    shape = [2] * n_atoms + [P]
    t = np.asarray(rho).reshape(shape + shape)
    axes = list(perm) + [n_atoms]
    axes = axes + [x + n_atoms + 1 for x in axes]
    return t.transpose(axes).reshape(D * P, D * P)


def all_permutations(n_atoms):
    return list(permutations(range(n_atoms)))


def product_state_full(single_atom, photon, n_atoms):
    return _kron(*([np.asarray(single_atom, complex)] * n_atoms), np.asarray(photon, complex))
