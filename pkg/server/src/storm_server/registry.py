"""Load every role's checkpoint at startup or refuse to start."""

from __future__ import annotations

import torch
from transformers import (
    AutoModel,
    AutoModelForCausalLM,
    AutoModelForMaskedLM,
    AutoModelForSeq2SeqLM,
    AutoModelForTokenClassification,
    AutoTokenizer,
)

from .config import ROLES, ServerConfig, StartupError
from .roles import Embedder, EventInferencer, Infiller, SequenceScorer, SrlTagger


def _load_generator(path):
    try:
        return AutoModelForCausalLM.from_pretrained(path)
    except (OSError, ValueError):
        return AutoModelForSeq2SeqLM.from_pretrained(path)


class ModelRegistry:
    """role name -> ready wrapper; construction fails fast per role."""

    def __init__(self, config: ServerConfig):
        torch.manual_seed(config.seed)
        self.config = config
        self.roles: dict[str, object] = {}
        loaders = {
            "events": self._load_events,
            "infill": self._load_infill,
            "score": self._load_score,
            "similarity": self._load_similarity,
            "srl": self._load_srl,
        }
        for role in ROLES:
            path = config.role_path(role)
            if not path.is_dir():
                raise StartupError(f"role {role!r}: checkpoint directory {path} is missing")
            try:
                self.roles[role] = loaders[role](path)
            except Exception as exc:
                raise StartupError(f"role {role!r}: cannot load checkpoint from {path}: {exc}") from exc

    def _prepare(self, model):
        model.eval()
        return model.to(self.config.device)

    def _load_events(self, path) -> EventInferencer:
        return EventInferencer(
            self._prepare(_load_generator(path)),
            AutoTokenizer.from_pretrained(path),
            self.config.device,
            self.config.decode.max_new_tokens,
        )

    def _load_infill(self, path) -> Infiller:
        return Infiller(
            self._prepare(AutoModelForMaskedLM.from_pretrained(path)),
            AutoTokenizer.from_pretrained(path),
            self.config.device,
        )

    def _load_score(self, path) -> SequenceScorer:
        return SequenceScorer(
            self._prepare(AutoModelForCausalLM.from_pretrained(path)),
            AutoTokenizer.from_pretrained(path),
            self.config.device,
        )

    def _load_similarity(self, path) -> Embedder:
        return Embedder(
            self._prepare(AutoModel.from_pretrained(path)),
            AutoTokenizer.from_pretrained(path),
            self.config.device,
        )

    def _load_srl(self, path) -> SrlTagger:
        return SrlTagger(
            self._prepare(AutoModelForTokenClassification.from_pretrained(path)),
            AutoTokenizer.from_pretrained(path),
            self.config.device,
        )

    def readiness(self) -> dict[str, bool]:
        return {role: role in self.roles for role in ROLES}
