"""Scan the rotation functional of the quadrant-bump pressure over the circle.

The functional alpha -> integral of pi over the rotated four-lobe body traces
the angular profile of the bump four times per turn.  The strictly increasing
variant has exactly two optimal rotations (0 and pi); the flat variant has
whole minimizing arcs, so the optimal set is not a manifold.
"""

import numpy as np

from pressurelab import DomainSpec, build_domain, el_residual, find_optimal_rotations, quadrant_bump_pressure, second_variation
from pressurelab.rotations import rotation_functional_profile
from pressurelab import svgplot

mesh = build_domain(DomainSpec.four_lobe(resolution=32))
alphas = np.linspace(0.0, 2 * np.pi, 256, endpoint=False)

for variant in ("strict", "flat"):
    bump = quadrant_bump_pressure(variant)
    values = rotation_functional_profile(mesh, bump, alphas)
    opt = find_optimal_rotations(mesh, bump, grid_n=1024)
    print(f"== {variant} variant ==")
    print(f"   functional range: [{values.min():.3e}, {values.max():.3e}]")
    print(f"   isolated optima : {[round(a, 6) for a in opt.angles]}")
    print(f"   flat arcs       : {[(round(a, 4), round(b, 4)) for a, b in opt.arcs]}")
    for a0 in opt.sample_angles(per_arc=3)[:4]:
        res = el_residual(mesh, bump, a0)
        sv = second_variation(mesh, bump, a0, 1.0)
        print(f"   alpha0={a0:8.4f}: stationarity residual {res:+.2e},"
              f" second variation {sv:+.2e}")
    svgplot.polar_chart(f"rotation_landscape_{variant}.svg", alphas, values,
                        title=f"rotation functional ({variant})")
    print(f"   wrote rotation_landscape_{variant}.svg")
