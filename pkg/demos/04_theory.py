"""Finite-sample expectations of the unnormalized statistic R - 2mn/N.

The bimodal expectation per query approaches -1/2.  The passive lower bound
sits at risk - 1/2 per query, so it falls below the bimodal value only once
(N_q - 1) * risk exceeds 1 - 2^-N_q.
"""
from le2st import (
    TheoryParams,
    crossover_query_count,
    expected_fr_variant_bimodal,
    expected_fr_variant_passive_lower_bound,
    expected_mn,
    gaussian_overlap_risk,
    knn_error_recursion,
)

risk = gaussian_overlap_risk(1.0)
print(f"overlap risk for two unit Gaussians at +-1: {risk:.4f}")
print("N_q   E_qb      E_qp bound  E[mn]")
for nq in (2, 4, 10, 50, 200):
    eb = expected_fr_variant_bimodal(nq)
    ep = expected_fr_variant_passive_lower_bound(TheoryParams(N_q=nq, risk=risk))
    print(f"{nq:<5d} {eb:<9.3f} {ep:<11.3f} {expected_mn(nq, 0.5):.1f}")
print("bimodal beats the passive bound from N_q =", crossover_query_count(risk))

print("f_2(5) from f_1(4)=0.3, f_1(5)=0.28:", knn_error_recursion({(1, 4): 0.3, (1, 5): 0.28}, 2, 5))
