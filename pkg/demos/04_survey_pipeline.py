"""
From survey rows to model inputs
================================

Validate raw rows against the schema ranges, encode them for both model
families, then split and balance.
"""

from relnet import data as dp

schema = dp.default_schema()
for f in schema.features:
    print(f"{f.name:<10} {f.kind:<8} [{f.min}, {f.max}]  {f.mlp_encoding}")

###############################################################################
# Out-of-range values are dropped and the record is set aside as incomplete.
rows = [
    {"Age": 24, "Education": 13, "Parity": 1, "Gravidity": 2, "FatherAge": 29, "HIV": 1},
    {"Age": 114, "Education": 9, "Parity": 0, "Gravidity": 1, "FatherAge": 30, "HIV": 0},
    {"Age": 31, "Education": 11, "Parity": 3, "Gravidity": 12, "FatherAge": "", "HIV": 0},
]
for r in rows:
    print(dp.validate(r, schema))

ds = dp.Dataset.from_rows(rows, schema)
print(len(ds), "complete,", len(ds.incomplete), "incomplete:", ds.incomplete)

###############################################################################
# The relational view keeps every column (target included) scaled to [0, 1].
# The MLP view has two scaled ages and three 4-bit counts: 14 inputs.
enc = dp.encode(ds)
print(enc.relnet_view)
print(enc.mlp_inputs, enc.labels)

###############################################################################
# On a synthetic sample, only the training side gets balanced.
sample = dp.synth_generate(schema, n=2000, positive_rate=0.25, planted=[("Age", "HIV", 1.0)], noise_std=0.2, seed=3)
train, test = dp.split(sample, 500, seed=3)
balanced = dp.balance(train, seed=3)
print("train positives", int(train.labels.sum()), "of", len(train))
print("balanced", int(balanced.labels.sum()), "of", len(balanced))
print("test positives", int(test.labels.sum()), "of", len(test))
