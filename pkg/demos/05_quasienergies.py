"""
Quasi-energy ladder of an island chain
======================================

A packet centred on one island of an order-r chain overlaps r Floquet states
whose quasi-energies are spaced by 2 pi / r.  The spectrum comes from the
Fourier transform of the autocorrelation <phi|U^N|phi>.  Takes about 10 s.
"""
import numpy as np

from kickedgauss import analysis, classical, quantum

K, r, kicks = 1.0, 8, 2**14
orbit = next(o for o in classical.find_periodic_orbits(K, r) if o.elliptic)
x0 = max(pt.x for pt in orbit.points if abs(pt.p) < 1e-9)

grid = quantum.Grid.symmetric(3.0, 2**14, 2e-4)
spec = quantum.quasienergy_spectrum(quantum.gaussian_packet(grid, x0), K, kicks)
fit = analysis.check_quasienergy_ladder(spec.strongest(r), r)
print(f"{len(spec)} peaks; strongest {r} fit E_n = 2 pi n/{r} + {fit.beta:.5f}")
print(f"max residual {fit.max_residual:.2e} rad = {fit.max_residual / spec.resolution:.2e} bins")
for E, wt in sorted(zip(spec.strongest(r).energies, spec.strongest(r).weights)):
    print(f"    E = {E:+.5f}   n = {np.round((E - fit.beta) * r / (2 * np.pi)) % r:.0f}   weight {wt:.3f}")
