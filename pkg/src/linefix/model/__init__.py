from .config import ModelConfig, TrainConfig
from .network import EncState, Prediction, RepairNetwork
from .packing import (DecoderBatch, EncoderBatch, PackedExample, collate,
                      decoder_inputs, pack_example)
from .train import EpochLog, evaluate_packed, pack_dataset, train
from .vocab import BOS, EOS, PAD, UNK, Vocabulary

__all__ = [
    "BOS", "DecoderBatch", "EOS", "EncState", "EncoderBatch", "EpochLog",
    "ModelConfig", "PAD", "PackedExample", "Prediction", "RepairNetwork",
    "TrainConfig", "UNK", "Vocabulary", "collate", "decoder_inputs",
    "evaluate_packed", "pack_dataset", "pack_example", "train",
]
