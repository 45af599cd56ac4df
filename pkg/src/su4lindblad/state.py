"""Coefficient representation of the atom-cavity density operator."""

from dataclasses import dataclass

import numpy as np

from .basis import BasisTable, enumerate_basis
from .errors import ShapeError


@dataclass(eq=False)
class CoefficientState:
    """Complex coefficients ``data[i, m, n]`` of ``P_i |m><n|``.

    ``i`` indexes ``basis``; ``m`` and ``n`` run over the Fock states
    ``0..n_max``.  The flattened layout (``data.ravel()``) is spin index
    outermost, then photon bra, then photon ket.
    """

    data: np.ndarray
    basis: BasisTable
    n_max: int
    truncation_loss: float = 0.0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        shape = (len(self.basis), self.n_max + 1, self.n_max + 1)
        if self.data.shape != shape:
            if self.data.size != np.prod(shape):
                raise ShapeError(f"expected {shape} coefficients, got {self.data.shape}")
            self.data = self.data.reshape(shape)

    @classmethod
    def zeros(cls, n_atoms, n_max):
        table = enumerate_basis(n_atoms)
        return cls(np.zeros((len(table), n_max + 1, n_max + 1), complex), table, n_max)

    @property
    def n_atoms(self):
        return self.basis.n_atoms

    @property
    def flat(self):
        return self.data.reshape(-1)

    def with_data(self, data):
        return CoefficientState(np.asarray(data, complex).reshape(self.data.shape),
                                self.basis, self.n_max, self.truncation_loss)

    def copy(self):
        return self.with_data(self.data.copy())

    def __add__(self, other):
        return self.with_data(self.data + other.data)

    def __sub__(self, other):
        return self.with_data(self.data - other.data)

    def __mul__(self, scalar):
        return self.with_data(self.data * scalar)

    __rmul__ = __mul__

    def adjoint(self):
        """Coefficients of the Hermitian conjugate operator.

        ``P_{q,q3,s3}^dagger = P_{q,q3,-s3}`` and ``(|m><n|)^dagger = |n><m|``.
        """
        perm = [self.basis.lookup(q, q3, -s3) for q, q3, s3 in
                zip(self.basis.two_q, self.basis.two_q3, self.basis.two_s3)]
        return self.with_data(np.conj(self.data[perm].transpose(0, 2, 1)))

    def hermiticity_residual(self):
        """Max-abs deviation from ``C^{m,n}_{q,q3,s3} = conj(C^{n,m}_{q,q3,-s3})``."""
        return float(np.max(np.abs(self.data - self.adjoint().data), initial=0.0))
