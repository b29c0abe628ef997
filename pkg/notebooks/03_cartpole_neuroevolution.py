# %% [markdown]
# # Neuroevolution on cart-pole
#
# A tiny tanh network (4 inputs, 16 hidden units, 1 output) balances a pole.
# The output's sign picks the push direction. Strategies search the flat
# weight vector; `reshape` maps it to named layers and back.

# %%
import numpy as np

from evostrat.harness import RunConfig, build_run, run_config
from evostrat.reshape import unflatten

config = RunConfig(strategy="openai_es", problem="cartpole", popsize=64, generations=150,
                   hidden=[16], max_steps=500, test_every=10, test_rollouts=32)
strategy, problem, params = build_run(config)
print("parameters searched:", problem.num_dims)
print({name: shape for name, shape in zip(problem.layout.names, problem.layout.shapes)})

# %% [markdown]
# Every tenth generation the mean policy is scored on 32 fresh episodes.
# Fitness is the negated return, so -500 means the pole stayed up for the full
# episode every time.

# %%
log = run_config(config)
for gen, fit in zip(log.test_gen, log.test_fitness):
    print(f"gen {gen + 1:4d}  mean test return {-fit:6.1f}")

# %% [markdown]
# The trained weights come back as named arrays.

# %%
weights = unflatten(log.final_state.mean, problem.layout)
for name, value in weights.items():
    print(name, value.shape, f"|w| = {np.linalg.norm(value):.2f}")

# %% [markdown]
# The network the strategies were originally benchmarked with on Ant has four
# hidden layers of 32 units. With Ant's 87 observation and 8 action
# dimensions that is 6248 parameters.

# %%
from evostrat.problems import MlpSpec

print(MlpSpec.build(87, 8, (32, 32, 32, 32)).num_params)
