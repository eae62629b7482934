"""Model and training hyperparameter containers."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass
class ModelConfig:
    token_embed_dim: int = 200
    pos_embed_dim: int = 100
    state_dim: int = 200
    lstm1_layers: int = 3
    graph_layers: int = 2
    lstm2_layers: int = 1
    lstm3_layers: int = 2
    dropout: float = 0.3
    max_decode_len: int = 64
    use_graph: bool = True      # False: per-token feed-forward layers instead
    use_feedback: bool = True   # False: zero message inputs and line offsets
    vocab_size: int = 0         # filled in when the vocabulary is built

    def __post_init__(self):
        for name in ("token_embed_dim", "pos_embed_dim", "state_dim",
                     "lstm1_layers", "graph_layers", "lstm2_layers",
                     "lstm3_layers", "max_decode_len"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.state_dim % 2:
            raise ValueError("state_dim must be even (split across directions)")
        if self.pos_embed_dim % 2:
            raise ValueError("pos_embed_dim must be even")

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(data: dict) -> "ModelConfig":
        return ModelConfig(**data)


@dataclass
class TrainConfig:
    epochs: int = 20
    batch_size: int = 25
    lr: float = 1e-4
    clip_norm: float = 1.0
    seed: int = 0
    eval_every: int = 1
    log_path: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)
