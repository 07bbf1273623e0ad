"""
Sampling weights with Metropolis-Hastings
=========================================

Plant ``x0 = 0.6 * x1`` in a two-node dataset and let the sampler find the
weight again. The chain keeps the lowest-error matrix it has seen.
"""

import numpy as np

from relnet import Mode, SamplerConfig, mse, train

x1 = np.linspace(0.0, 1.0, 11)
data = np.column_stack([0.6 * x1, x1])

###############################################################################
# A brute-force scan gives the answer to aim for.
grid = np.arange(1001) / 1000
scan = [np.mean((data[:, 0] - w * data[:, 1]) ** 2) for w in grid]
print("grid search optimum:", grid[np.argmin(scan)])

###############################################################################
# Default settings: step 0.05, temperature 0.01, 20,000 proposals.
net, report = train(data, "linear", SamplerConfig(seed=1))
print("sampled weight w[0, 1] =", round(net.weights[0, 1], 4))
print("best error", report.best_error, "accepted", report.accepted_count, "of", report.iterations_run)

trace = np.array(report.error_trace)
for it in (0, 10, 100, 1000, 20_000):
    print(f"  best error after {it:>6} proposals: {trace[it]:.6f}")

###############################################################################
# Zero temperature gives greedy descent; target-only mode scores just one node.
net, report = train(data, "linear", SamplerConfig(seed=1, temperature=0.0, mode=Mode.TARGET_ONLY, target=0))
print("greedy, target only:", round(net.weights[0, 1], 4), "error", mse(net, data, Mode.TARGET_ONLY, 0))
