"""Token vocabulary with reserved ids and a frequency cutoff."""

from __future__ import annotations

from collections import Counter
from typing import Iterable

PAD, UNK, BOS, EOS = 0, 1, 2, 3
RESERVED = ("<pad>", "<unk>", "<bos>", "<eos>")


class Vocabulary:
    def __init__(self, tokens: list[str]):
        self.id_to_token: list[str] = list(RESERVED) + list(tokens)
        self.token_to_id: dict[str, int] = {
            tok: i for i, tok in enumerate(self.id_to_token)}
        if len(self.token_to_id) != len(self.id_to_token):
            raise ValueError("duplicate tokens in vocabulary")

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def id(self, token: str) -> int:
        return self.token_to_id.get(token, UNK)

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self.id(t) for t in tokens]

    def token(self, idx: int) -> str:
        return self.id_to_token[idx]

    def non_reserved(self) -> list[str]:
        return self.id_to_token[len(RESERVED):]

    @staticmethod
    def build(examples, min_freq: int = 2) -> "Vocabulary":
        """Count surface forms over broken programs, messages, and gold lines."""
        counts: Counter[str] = Counter()
        for ex in examples:
            for line in ex.broken.lines:
                counts.update(t.text for t in line)
            counts.update(t.text for t in ex.feedback.m_err)
            counts.update(t.text for t in ex.repaired_line)
        kept = sorted(t for t, c in counts.items() if c >= min_freq)
        return Vocabulary(kept)
