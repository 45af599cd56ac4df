"""
Photon statistics of a bad-cavity ensemble
==========================================

With the cavity much faster than the atoms, the photons mirror the collective
dipole.  With the pump expressed in units of the collective rate
Gamma_c = omega^2 / kappa, weak pumping gives strongly bunched light and
stronger pumping drives g2(0) down.  The spin populations show where the
atoms accumulate.
"""

from su4lindblad import ModelParams, build_generator, expectations, steady_state
from su4lindblad.projection import project_blocks, sm_populations

base = ModelParams(N=6, omega=0.05, kappa=1.0, gamma_decay=0.0, n_max=6)
gamma_c = base.omega**2 / base.kappa

for w in (0.1, 1.0, 5.0, 15.0):
    ss = steady_state(build_generator(base.replace(w=w * gamma_c), sectors=[0]))
    pops = sm_populations(project_blocks(ss))
    (two_s, two_m), top = max(pops.items(), key=lambda kv: kv[1])
    print(f"w = {w:5.1f} Gamma_c: g2(0) = {expectations(ss).g2_zero:.3f}, "
          f"largest population p(S={two_s / 2:g}, M={two_m / 2:g}) = {top:.3f}")
