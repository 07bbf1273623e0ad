"""
Relational network basics
=========================

Every feature is a node, and each node is estimated from all the others
through one shared edge function. This script builds a tiny three-node
network by hand and evaluates it.
"""

import numpy as np

from relnet import Activation, RelationalNetwork

###############################################################################
# Weights are read row-wise: ``weights[k, j]`` is how much node ``j`` feeds
# node ``k``. The diagonal must be zero and everything lives in [0, 1].
weights = np.array([
    [0.0, 0.25, 0.5],
    [0.1, 0.0, 0.2],
    [0.3, 0.4, 0.0],
])
observed = np.array([0.8, 0.0, 1.0])

for act in Activation:
    net = RelationalNetwork(("a", "b", "c"), weights, act)
    print(f"{act.value:>8}: node a <- {net.node_predict(observed, 'a'):.7f}   all nodes {np.round(net.predict_all(observed), 4)}")

###############################################################################
# The node being estimated is never read, so its own value can be anything.
net = RelationalNetwork(("a", "b", "c"), weights, "logistic")
print(net.node_predict([123.0, 0.0, 1.0], 0) == net.node_predict([0.0, 0.0, 1.0], 0))

###############################################################################
# For classification the raw estimate is clamped to [0, 1] and rounded,
# with exact halves going to the positive class.
print(net.classify(observed, "a"))
print(RelationalNetwork(("a", "b"), [[0, 1], [0, 0]], "linear").classify([0.0, 0.5], 0))

###############################################################################
# Networks are plain JSON and round-trip exactly.
text = net.to_json()
print(text)
assert RelationalNetwork.from_json(text) == net
