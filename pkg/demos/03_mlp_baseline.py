"""
The MLP baseline
================

Tanh hidden layer, logistic output, squared error, trained by full-batch
backpropagation with momentum.
"""

import numpy as np

from relnet import MlpModel, TrainingConfig, train_mlp
from relnet.mlp import init_mlp

###############################################################################
# A one-unit model evaluated by hand: logistic(tanh(1)).
m = MlpModel([[1.0, 0.0]], [[1.0, 0.0]])
print(m.forward([1.0]), 1 / (1 + np.exp(-np.tanh(1.0))))

###############################################################################
# Gradients against central differences on a random model.
rng = np.random.default_rng(0)
model = init_mlp(3, 2, rng)
x, label = rng.random(3), 1
g1, _ = model.gradient(x, label)
h = 1e-5
w_up, w_dn = model.w1.copy(), model.w1.copy()
w_up[0, 0] += h
w_dn[0, 0] -= h
fd = ((MlpModel(w_up, model.w2).forward(x) - label) ** 2 - (MlpModel(w_dn, model.w2).forward(x) - label) ** 2) / (2 * h)
print("analytic", g1[0, 0], "finite difference", fd)

###############################################################################
# XOR needs the hidden layer.
X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=float)
y = np.array([0, 1, 1, 0])
xor = train_mlp(X, y, TrainingConfig(cycles=5000, seed=0), hidden=4)
print("XOR outputs", np.round(xor.forward(X), 3), "classes", xor.classify_batch(X))
