"""
The symmetric Liouville basis
=============================

Density matrices of N identical two-level atoms that are invariant under atom
permutations are expanded on a basis labelled by how many atoms sit in each
of the four single-atom operators |1><1|, |0><0|, |1><0| and |0><1|.  This
script shows how small that basis is, checks two of the su(2) subalgebras
acting on it and compares the Casimir with its closed form.
"""

import numpy as np

from su4lindblad import basis_size, casimir_eigenvalue, enumerate_basis
from su4lindblad.basis import casimir_matrix

# basis size versus the full Liouville space 4^N
for N in (1, 2, 5, 10, 20, 30):
    print(f"N={N:2d}: symmetric basis {basis_size(N):6d}, full space {4**N:.3e}")

# the first few elements for two atoms, as doubled labels (2q, 2q3, 2sigma3)
table = enumerate_basis(2)
print("N=2 labels:", [tuple(table.labels[i]) for i in range(len(table))])

# [Q+, Q-] = 2 Q3 holds exactly on the basis
p, m, z = (table.matrix(("Q", s)) for s in "+-3")
print("max |[Q+,Q-] - 2 Q3| =", abs(p @ m - m @ p - 2 * z).max())

# the quadratic Casimir is proportional to the identity
for N in (2, 4, 6):
    c = casimir_matrix(enumerate_basis(N)).diagonal()
    print(f"N={N}: Casimir diagonal in [{c.min():.6f}, {c.max():.6f}], closed form {casimir_eigenvalue(N):.6f}")
