"""
How many rows do the guarantees ask for?
========================================

The closed-form sample sizes are far more conservative than what works in
practice. Compare them with a small Monte Carlo sweep.
"""

from sketchlsr import bounds
from sketchlsr.harness import ExperimentConfig, ProblemSpec, run_experiment

d, mu = 10, 2.5
print("leverage sampling, eps = 0.5:", bounds.theorem1_sample_size(d, 0.5))
print("uniform sampling, rounded:   ", bounds.theorem2_sample_size(d, mu))
print("uniform sampling, exact:     ",
      bounds.uniform_sample_size(d, mu, bounds.UNIFORM_THETA1, bounds.UNIFORM_THETA2,
                                 bounds.UNIFORM_DELTA, bounds.UNIFORM_DELTA))
print("boosting 20 independent tries:", round(bounds.boost_success(20), 4))

# what actually happens at much smaller c
config = ExperimentConfig(problem=ProblemSpec(8192, d, kappa=10.0, gamma=0.9, seed=0),
                          sampler="uniform", c_grid=(20, 40, 80, 160, 320), trials=100)
stats = run_experiment(config)
print()
print(stats.csv_lines())
