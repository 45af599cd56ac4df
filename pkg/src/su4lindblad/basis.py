"""Fully symmetric SU(4) basis of the N-atom Liouville space.

A basis element is the symmetrized product of the single-atom matrix units
``u = |1><1|``, ``d = |0><0|``, ``s = |1><0|`` and ``c = |0><1|``.  It is
stored through its occupations ``(alpha, beta, gamma, delta)`` of the four
flavours.  The symmetrizer is the arithmetic mean over all distinct
arrangements, so that every basis element with ``gamma = delta = 0`` has unit
trace.

All half-integer quantum numbers are handled in doubled (integer) form:
``two_q = 2 q`` and so on.
"""

from fractions import Fraction
from math import factorial
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .errors import InvalidParameterError, ShapeError

MAX_ATOMS = 200

FLAVOURS = ("u", "d", "s", "c")

FAMILIES = ("Q", "Sigma", "M", "N", "U", "V")
PARTS = ("+", "-", "3")


class BasisLabel(NamedTuple):
    """Occupation numbers of one symmetric basis element."""

    alpha: int
    beta: int
    gamma_occ: int
    delta_occ: int

    @property
    def n_atoms(self):
        return self.alpha + self.beta + self.gamma_occ + self.delta_occ

    @property
    def two_q(self):
        return self.alpha + self.beta

    @property
    def two_q3(self):
        return self.alpha - self.beta

    @property
    def two_s3(self):
        return self.gamma_occ - self.delta_occ

    @classmethod
    def from_doubled(cls, n_atoms, two_q, two_q3, two_s3):
        """Inverse of ``(two_q, two_q3, two_s3)``; returns None when out of range."""
        rest = n_atoms - two_q
        if (two_q + two_q3) % 2 or (rest + two_s3) % 2 or rest < 0:
            return None
        if abs(two_q3) > two_q or abs(two_s3) > rest:
            return None
        return cls((two_q + two_q3) // 2, (two_q - two_q3) // 2,
                   (rest + two_s3) // 2, (rest - two_s3) // 2)


class QuantumNumbers(NamedTuple):
    q: Fraction
    q3: Fraction
    sigma: Fraction
    sigma3: Fraction
    m: Fraction
    m3: Fraction
    n: Fraction
    n3: Fraction
    u: Fraction
    u3: Fraction
    v: Fraction
    v3: Fraction


def _doubled_numbers(a, b, g, d):
    # order matches QuantumNumbers
    return (a + b, a - b, g + d, g - d, a + d, a - d,
            g + b, g - b, a + g, a - g, d + b, d - b)


def labels_of(b):
    """All twelve quantum numbers of a basis element, as exact fractions."""
    return QuantumNumbers(*(Fraction(x, 2) for x in _doubled_numbers(*b)))


class SuperOpId(NamedTuple):
    family: str
    part: str

    def __str__(self):
        return f"{self.family}{self.part}"

    @classmethod
    def parse(cls, text):
        for fam in sorted(FAMILIES, key=len, reverse=True):
            if text.startswith(fam) and text[len(fam):] in PARTS:
                return cls(fam, text[len(fam):])
        raise InvalidParameterError(f"unknown superoperator {text!r}")


SUPEROPS = tuple(SuperOpId(f, p) for f in FAMILIES for p in PARTS)

# position of (two_o, two_o3) for each family inside _doubled_numbers
_FAMILY_SLOT = {"Q": 0, "Sigma": 2, "M": 4, "N": 6, "U": 8, "V": 10}

# shift of (two_q, two_q3, two_s3) for the raising part; lowering is the negative
_RAISE_SHIFT = {
    "Q": (0, 2, 0),
    "Sigma": (0, 0, 2),
    "M": (1, 1, 1),
    "N": (-1, 1, 1),
    "U": (1, 1, -1),
    "V": (-1, 1, -1),
}


class BasisTable:
    """Ordered, immutable enumeration of the symmetric basis for ``n_atoms``.

    Ordering is lexicographic in ``(two_q, two_q3, two_s3)``, each descending,
    so the trace-carrying elements (``q = N/2, sigma3 = 0``) come first.
    """

    def __init__(self, n_atoms):
        self.n_atoms = n_atoms
        keys = []
        for two_q in range(n_atoms, -1, -1):
            rest = n_atoms - two_q
            for two_q3 in range(two_q, -two_q - 1, -2):
                for two_s3 in range(rest, -rest - 1, -2):
                    keys.append((two_q, two_q3, two_s3))
        self.labels = tuple(BasisLabel.from_doubled(n_atoms, *k) for k in keys)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self._doubled_index = {k: i for i, k in enumerate(keys)}
        occ = np.array(self.labels, dtype=np.int64).reshape(-1, 4)
        self.occupations = occ
        self.doubled = np.array(
            [_doubled_numbers(*lab) for lab in self.labels], dtype=np.int64
        ).reshape(-1, 12)
        self.two_q = occ[:, 0] + occ[:, 1]
        self.two_q3 = occ[:, 0] - occ[:, 1]
        self.two_s3 = occ[:, 2] - occ[:, 3]
        self.trace_mask = (occ[:, 2] == 0) & (occ[:, 3] == 0)
        self.trace_indices = np.flatnonzero(self.trace_mask)
        self._maps = {}
        self._matrices = {}

    def __len__(self):
        return len(self.labels)

    def __repr__(self):
        return f"BasisTable(n_atoms={self.n_atoms}, size={len(self)})"

    def lookup(self, two_q, two_q3, two_s3):
        """Dense offset of the element with doubled labels, or None."""
        return self._doubled_index.get((two_q, two_q3, two_s3))

    def arrangements(self, i):
        """Number of distinct tensor-product arrangements of element ``i``."""
        a, b, g, d = self.labels[i]
        return factorial(self.n_atoms) // (
            factorial(a) * factorial(b) * factorial(g) * factorial(d))

    def ladder_map(self, op):
        """Sparse action of one superoperator as ``(src, dst, factor)`` arrays.

        ``op`` applied to basis element ``src[k]`` gives ``factor[k]`` times
        element ``dst[k]``.  Pairs with vanishing factor are omitted.
        """
        op = _as_op(op)
        if op in self._maps:
            return self._maps[op]
        slot = _FAMILY_SLOT[op.family]
        two_o = self.doubled[:, slot]
        two_o3 = self.doubled[:, slot + 1]
        if op.part == "3":
            src = np.arange(len(self))
            keep = two_o3 != 0
            res = src[keep], src[keep], two_o3[keep] / 2.0
        else:
            sign = 1 if op.part == "+" else -1
            factor = (two_o - sign * two_o3) // 2
            shift = tuple(sign * s for s in _RAISE_SHIFT[op.family])
            src, dst, fac = [], [], []
            for i in np.flatnonzero(factor):
                j = self.lookup(self.two_q[i] + shift[0],
                                self.two_q3[i] + shift[1],
                                self.two_s3[i] + shift[2])
                if j is None:
                    continue
                src.append(i)
                dst.append(j)
                fac.append(float(factor[i]))
            res = (np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
                   np.array(fac, dtype=float))
        for arr in res:
            arr.flags.writeable = False
        self._maps[op] = res
        return res

    def matrix(self, op):
        """Superoperator as a sparse ``K x K`` matrix acting on the spin index."""
        op = _as_op(op)
        if op not in self._matrices:
            src, dst, fac = self.ladder_map(op)
            k = len(self)
            self._matrices[op] = sp.csr_matrix((fac, (dst, src)), shape=(k, k))
        return self._matrices[op]


def _as_op(op):
    if isinstance(op, SuperOpId):
        return op
    if isinstance(op, tuple):
        return SuperOpId(*op)
    return SuperOpId.parse(op)


def basis_size(n_atoms):
    return (n_atoms + 1) * (n_atoms + 2) * (n_atoms + 3) // 6


_TABLES = {}


def enumerate_basis(n_atoms, max_atoms=MAX_ATOMS):
    """Return the (cached) basis table for ``n_atoms`` two-level atoms."""
    if not isinstance(n_atoms, (int, np.integer)) or n_atoms < 1:
        raise InvalidParameterError(f"atom count must be a positive integer, got {n_atoms!r}")
    if n_atoms > max_atoms:
        raise InvalidParameterError(f"atom count {n_atoms} exceeds maximum {max_atoms}")
    n_atoms = int(n_atoms)
    if n_atoms not in _TABLES:
        _TABLES[n_atoms] = BasisTable(n_atoms)
    return _TABLES[n_atoms]


def _check_state(state):
    if state.data.shape != (len(state.basis), state.n_max + 1, state.n_max + 1):
        raise ShapeError(f"coefficient array has shape {state.data.shape}")


def apply_superop(op, state):
    """Apply one of the 18 superoperators to the spin part of a state."""
    _check_state(state)
    out = state.basis.matrix(op) @ state.data.reshape(len(state.basis), -1)
    return state.with_data(out.reshape(state.data.shape))


PHOTON_SIDES = ("left-a", "left-adag", "right-a", "right-adag")


def apply_photon(side, state):
    """Act with ``a`` or ``a^dagger`` on the photon bra or ket.

    ``left-*`` multiplies the density operator from the left, ``right-*`` from
    the right.  Amplitudes pushed above ``n_max`` are dropped; their absolute
    sum is added to ``truncation_loss`` of the returned state.
    """
    _check_state(state)
    c = state.data
    out = np.zeros_like(c)
    sq = np.sqrt(np.arange(state.n_max + 1, dtype=float))
    loss = 0.0
    if side == "left-a":
        out[:, :-1, :] = sq[1:, None] * c[:, 1:, :]
    elif side == "left-adag":
        out[:, 1:, :] = sq[1:, None] * c[:, :-1, :]
        loss = np.sqrt(state.n_max + 1) * np.abs(c[:, -1, :]).sum()
    elif side == "right-a":
        out[:, :, 1:] = sq[1:] * c[:, :, :-1]
        loss = np.sqrt(state.n_max + 1) * np.abs(c[:, :, -1]).sum()
    elif side == "right-adag":
        out[:, :, :-1] = sq[1:] * c[:, :, 1:]
    else:
        raise InvalidParameterError(f"unknown photon side {side!r}; expected one of {PHOTON_SIDES}")
    res = state.with_data(out)
    res.truncation_loss = state.truncation_loss + float(loss)
    return res


def casimir_eigenvalue(n_atoms):
    return 3 * n_atoms * (n_atoms + 4) / 8


def casimir_matrix(table):
    """Quadratic Casimir built from the superoperators (sparse ``K x K``)."""
    m = table.matrix
    total = sp.csr_matrix((len(table), len(table)))
    for fam in FAMILIES:
        total = total + m((fam, "-")) @ m((fam, "+")) + m((fam, "3"))
    u3, s3, q3 = m(("U", "3")), m(("Sigma", "3")), m(("Q", "3"))
    a = u3 + 2 * s3
    b = 3 * q3 - 2 * u3 - s3
    return (total + u3 @ u3 + (a @ a) / 3 + (b @ b) / 6).tocsr()


def casimir_apply(state):
    _check_state(state)
    out = casimir_matrix(state.basis) @ state.data.reshape(len(state.basis), -1)
    return state.with_data(out.reshape(state.data.shape))
