# %% [markdown]
# # Restarting a stuck search
#
# On multimodal problems CMA-ES with a small population often settles in a
# local basin. `RestartWrapper` watches each generation and re-initializes the
# inner strategy when the fitness spread collapses, the best value stagnates,
# or the step size shrinks below a threshold. The best solution found so far
# and the generation counter survive restarts.

# %%
import numpy as np

from evostrat import run_loop
from evostrat.harness import RestartCriteria, RestartWrapper
from evostrat.problems import make_problem
from evostrat.strategies import CMAES

problem = make_problem("rastrigin", 4)
plain = CMAES(popsize=8, num_dims=4)
params = plain.default_params.replace(sigma_init=2.0)
wrapped = RestartWrapper(plain, RestartCriteria(fitness_spread_tol=1e-6, stagnation_generations=40))

for seed in range(4):
    a = run_loop(plain, problem, 600, seed=seed, params=params, init_mean=3.0)
    b = run_loop(wrapped, problem, 600, seed=seed, params=params, init_mean=3.0)
    print(f"seed {seed}: plain {a.best_fitness[-1]:7.3f}   with restarts {b.best_fitness[-1]:7.3f}"
          f"   ({b.final_state.num_restarts} restarts)")

# %% [markdown]
# Restarts reuse the original population size. `copy_mean=True` restarts from
# the current mean instead of the initial one.

# %%
local = RestartWrapper(plain, RestartCriteria(scale_tol=1e-4), copy_mean=True)
log = run_loop(local, problem, 600, seed=0, params=params, init_mean=3.0)
print("copy_mean restarts:", log.final_state.num_restarts, "best", round(log.best_fitness[-1], 3))
print("best fitness never increases:", bool(np.all(np.diff(log.best_fitness) <= 0)))
