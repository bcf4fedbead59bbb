"""
Phase space of the kicked Gaussian map
======================================

A particle receives a short kick ``p -> p - K x exp(-x^2/2)`` once per period
and then moves freely.  For ``0 < K < 4`` the origin is a stable fixed point
surrounded by a regular island; further out the motion becomes chaotic and
trajectories escape.

Run with ``python demos/01_phase_space.py``.
"""
import numpy as np

from kickedgauss import classical

# The origin rotates by omega per kick.  The angle comes from the trace of the
# one-kick Jacobian at x = 0.
for K in (0.5, 1.0, 2.0, 3.5):
    omega = classical.orbit_rotation_angle(K)
    print(f"K={K:4}  omega={omega:.6f}  rotation period {2 * np.pi / omega:6.2f} kicks")

###############################################################################
# Orbits of a few launch points at K = 1.  Regular orbits stay bounded,
# chaotic ones wander off to large |x|.
K = 1.0
orbits = classical.phase_portrait(K, classical.default_launches(K), 2000)
spread = [np.abs(o[:, 0]).max() for o in orbits]
print(f"{len(orbits)} orbits; {sum(s < 5 for s in spread)} stay within |x| < 5")

###############################################################################
# Period-8 island chain.  Fixed points of M^8 are searched on the symmetry
# line p = 0, where the reversor (x, p) -> (x - p, -p) acts trivially.
for o in classical.find_periodic_orbits(K, 8):
    kind = "elliptic" if o.elliptic else "hyperbolic"
    x = min(pt.x for pt in o.points if abs(pt.p) < 1e-9 and pt.x > 0)
    print(f"period-8 {kind:10s} orbit through x={x:.6f}, residue trace={o.trace:+.4f}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots(figsize=(5, 5))
    for o in orbits:
        ax.plot(o[:, 0], o[:, 1], ",", ms=1)
    ax.set(xlim=(-4, 4), ylim=(-2, 2), xlabel="x", ylabel="p", title=f"K = {K}")
    fig.savefig("phase_space.png", dpi=150)
    print("wrote phase_space.png")
