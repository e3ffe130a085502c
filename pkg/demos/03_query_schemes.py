"""Compare what each query scheme picks from the same pool, and check the LP.

Bimodal querying takes the most confident point of each class.  The linear
program behind it has a two-point closed form, which vertex enumeration
confirms on random instances.
"""
import numpy as np

from le2st import (
    LpInstance,
    PointSet,
    PosteriorModel,
    QueryState,
    bimodal_select,
    certainty_select,
    lp_brute_force,
    lp_closed_form,
    passive_select,
    uncertainty_select,
)

# one-dimensional pool whose coordinate is the class-1 log-odds
pool = PointSet([-3.0, -0.2, 0.1, 1.0, 4.0])
model = PosteriorModel([1.0], 0.0)
state = QueryState(pool)
print("P(z=1):", np.round(model.prob1(pool.points), 3))
print("bimodal    ", bimodal_select(state, model))
print("uncertainty", uncertainty_select(state, model))
print("certainty  ", certainty_select(state, model))
print("passive    ", passive_select(state, np.random.default_rng(0)))

inst = LpInstance((0.9, 0.5, 0.1), u=0.2)
sol = lp_closed_form(inst)
print(f"LP closed form: w={sol.weights(3)}, objective {sol.objective:.4f}")
print(f"vertex enumeration objective {lp_brute_force(inst).objective:.4f}")
