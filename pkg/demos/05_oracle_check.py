"""
Checking against brute force
============================

For a handful of atoms the full 2^N x 2^N density matrix fits in memory.
The reference solver builds the master equation from per-atom Pauli matrices,
knowing nothing about the symmetric basis, and the two results are compared
for a random parameter set.
"""

from su4lindblad.check import oracle_check

params, dev = oracle_check(3, seed=7)
print(params)
for key in sorted(dev):
    print(f"{key:28s} {dev[key]:.2e}")
print("largest deviation:", f"{max(dev.values()):.2e}")
