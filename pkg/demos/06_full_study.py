"""
A desk-scale study
==================

Synthetic survey data with age driving HIV status, the MLP against three
relational networks, and the learned weights into the target. The
``relnet reproduce`` command runs the same thing and writes every artifact.
"""

from relnet import data as dp
from relnet.evaluate import compare, confusion, format_comparison, relation_report
from relnet.mlp import TrainingConfig, train_mlp
from relnet.network import Activation
from relnet.sampler import SamplerConfig, train

schema = dp.default_schema()
sample = dp.synth_generate(schema, n=6000, positive_rate=0.25, planted=[("Age", "HIV", 1.0)], noise_std=0.2, seed=7)
train_set, test_set = dp.split(sample, 1500, seed=7)
fit = dp.encode(dp.balance(train_set, seed=7))
held = dp.encode(test_set)
target = schema.target_index

results = []
mlp = train_mlp(fit.mlp_inputs, fit.labels, TrainingConfig(seed=7), hidden=17)
results.append(("mlp", confusion(held.labels, mlp.classify_batch(held.mlp_inputs))))

###############################################################################
# A low temperature keeps the walk near good matrices in 30 dimensions.
nets = {}
for act in Activation:
    cfg = SamplerConfig(seed=7, step_scale=0.02, temperature=1e-5)
    nets[act], _ = train(fit.relnet_view, act, cfg, node_names=schema.names)
    results.append((f"relnet-{act.value}", confusion(held.labels, nets[act].classify_batch(held.relnet_view, target))))

print(format_comparison(compare(results)))

###############################################################################
# The planted feature should carry the largest weight into HIV.
for act, net in nets.items():
    print(relation_report(net, "HIV").to_text())
