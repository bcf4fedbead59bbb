"""
Three timescales in an island chain
===================================

A packet sitting in one island of an order-r chain hops between islands
(period r/2 in the overlap), circles the island centre (2 pi r / omega_bar)
and slowly dephases between the two maps (2 pi r / delta omega).  The
rotation angles come from the tangent map of M^r at the chain's periodic
orbit.  Takes about 10 s.
"""
from kickedgauss import analysis, quantum

grid = quantum.Grid.symmetric(3.0, 2**14, 2e-4)
for K1, K2, r, hint in ((2.10, 2.11, 4, 0.32), (1.0, 1.01, 8, 1.13)):
    pred = analysis.predict_chain_periods(K1, K2, r, hint)
    # launch halfway between the two maps' island centres
    x0 = analysis.chain_launch_point(K1, K2, r, hint)
    tr = quantum.fidelity_trace(quantum.gaussian_packet(grid, x0), K1, K2, 4000)
    meas = analysis.measure_chain_periods(tr)
    print(f"r={r}: omega1={pred.omega1:.4f} omega2={pred.omega2:.4f} launch x0={x0:.5f}")
    for name, a, b in zip(("shortest", "medium", "longest"), pred.periods, meas.periods):
        print(f"    {name:8s} predicted {a:8.2f}   measured {b:8.2f}")
