"""
Oblivious sketches on a tall problem
====================================

SRHT and sparse embeddings do not look at the data before drawing, so they
skip the SVD entirely. This script times both against the exact solve.
"""

import time

import numpy as np

from sketchlsr import RegressionProblem, exact_lsr
from sketchlsr.sketches import SeededRng, draw_sparse_embedding, draw_srht
from sketchlsr.solver import error_ratio, solve_sketched

gen = np.random.default_rng(0)
n, d = 2**19, 10
X = gen.standard_normal((n, d))
problem = RegressionProblem(X, X @ gen.standard_normal(d) + 0.5 * gen.standard_normal(n))

t0 = time.perf_counter()
_, residual_sq = exact_lsr(problem)
print(f"exact:  {time.perf_counter() - t0:.3f}s")

# the first SRHT call compiles the transform kernel; run it once off the clock
solve_sketched(problem, draw_srht(n, 64, SeededRng(0)))

for name, draw, c in (("srht", draw_srht, 2000), ("sparse", draw_sparse_embedding, 4000)):
    t0 = time.perf_counter()
    solution = solve_sketched(problem, draw(n, c, SeededRng(1)))
    elapsed = time.perf_counter() - t0
    print(f"{name}: {elapsed:.3f}s   c={c}   ratio {error_ratio(problem, solution, residual_sq):.4f}")
