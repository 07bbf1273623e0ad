"""Relational networks trained by Metropolis-Hastings sampling, with an MLP baseline."""

from .data import (
    Dataset,
    Feature,
    FeatureSchema,
    Planted,
    balance,
    default_schema,
    encode,
    four_bit,
    lookup_encode,
    normalize,
    read_csv,
    split,
    synth_generate,
    validate,
    write_csv,
)
from .evaluate import ConfusionMatrix, accuracy, compare, confusion, rates, relation_report
from .mlp import MlpModel, TrainingConfig, train_mlp
from .network import Activation, RelationalNetwork
from .sampler import Mode, SamplerConfig, TrainReport, mse, propose, train

__version__ = "0.1.0"
