"""Divergence of the labeled set across budgets, and power across dimensions.

Bimodal querying concentrates labels where the classes are easiest to tell
apart, so its labeled set looks more separated than a uniform sample of the
same size.
"""
from dataclasses import replace

from le2st import ExperimentConfig, SyntheticSpec, dimension_sweep, divergence_curve

spec = SyntheticSpec("location_alt", 500)
cfg = ExperimentConfig(Q_max=100, trials=30)
for scheme in ("bimodal", "passive"):
    pts = divergence_curve(spec, replace(cfg, scheme=scheme), [0.1, 0.2, 0.5, 1.0])
    print(scheme, " ".join(f"{p.budget_fraction:.1f}:{p.mean:.3f}" for p in pts))

for row in dimension_sweep(replace(cfg, trials=40), [2, 6, 10], 0.2, spec=replace(spec, delta1=0.4)):
    print(f"d={row['d']:<3d} {row['scheme']:<8s} type II {row['type2']:.3f}")
