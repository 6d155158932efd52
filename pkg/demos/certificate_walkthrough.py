"""
Checking one sketched solve against its certificate
===================================================

For any sketch, the excess residual of the sketched solution splits exactly
into the optimal residual plus a term living in the column space of X.
The certificate reports every quantity in that chain.
"""

from sketchlsr import exact_lsr, leverage_scores, thin_svd
from sketchlsr.harness import ProblemSpec, generate_problem
from sketchlsr.sketches import SamplerConfig, SeededRng
from sketchlsr.solver import certify, solve_sketched

problem = generate_problem(ProblemSpec(2000, 8, kappa=1e3, gamma=0.6, seed=3)).problem
svd = thin_svd(problem.X)
beta, residual_sq = exact_lsr(problem, svd)

op = SamplerConfig("leverage", 200).draw(problem.n, SeededRng(11), leverage_scores(svd))
solution = solve_sketched(problem, op)
cert = certify(problem, svd, op, solution, beta)

print(f"rows kept: {solution.c_realized}")
print(f"singular values of SU in [{cert.sigma_min_SU:.3f}, {cert.sigma_max_SU:.3f}]")
print(f"|y - X b~|^2 = {solution.residual_sq_full:.6f}")
print(f"  = |r|^2 {residual_sq:.6f} + |Uz|^2 {cert.uz_norm_sq:.6f}"
      f"   (gap {cert.equality_gap:.1e})")
print(f"|z| = {cert.z_norm:.4g} <= {cert.z_bound:.4g}")
print(f"|b - b~|^2 = {cert.beta_gap_sq:.4g} <= {cert.beta_gap_bound:.4g}")

# every check must hold for every sketch, good or bad
print(cert.checks())
