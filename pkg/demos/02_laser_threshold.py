"""
Laser threshold from the steady state
=====================================

A pumped ensemble of atoms in a lossy cavity.  Sweeping the incoherent pump w
moves the steady state from thermal light towards coherent light.  For each
pump rate we solve for the steady state directly in the symmetric basis and
report the mean photon number, the photon statistics and the atomic entropy.
"""

import numpy as np

from su4lindblad import ModelParams, boundary_population, build_generator, expectations, steady_state
from su4lindblad.projection import entropy, project_blocks

base = ModelParams(N=6, omega=1.0, gamma_decay=1.0, kappa=1.0, n_max=40)

print(f"{'w':>6} {'<n>':>9} {'g2(0)':>8} {'Fano':>8} {'S [nat]':>8} {'boundary':>9}")
for w in np.arange(1.0, 9.0):
    p = base.replace(w=float(w))
    # photon number is conserved together with the inversion label, so only
    # the sector holding the steady state is built
    L = build_generator(p, sectors=[0])
    ss = steady_state(L)
    rep = expectations(ss)
    n1, n2 = rep.mean_photon, rep.photon_moment2
    fano = (n2 + n1 - n1**2) / n1
    S = entropy(project_blocks(ss))
    print(f"{w:6.1f} {n1:9.4f} {rep.g2_zero:8.4f} {fano:8.4f} {S:8.4f} {boundary_population(ss):9.1e}")

# the boundary column is the population of the last Fock level kept; it must
# stay small for the cutoff n_max to be trustworthy
