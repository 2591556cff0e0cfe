#!/usr/bin/env python3
"""Build tiny randomly-initialized checkpoints for every server role.

The resulting models are schema-compatible with the real thing and drive
the full serving stack end to end; they are meant for tests and offline
smoke runs, not for story quality. Usage:

    python3 tools/make_tiny_checkpoints.py /path/to/model_dir
"""

from __future__ import annotations

import sys
from pathlib import Path

import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers
from transformers import (
    GPT2Config,
    GPT2LMHeadModel,
    PreTrainedTokenizerFast,
    RobertaConfig,
    RobertaForMaskedLM,
    RobertaForTokenClassification,
    RobertaModel,
)

WORDS = (
    "jenny anna bob charles david sarah girl hero king "
    "lived live in at on to the a an of and florida beach sea water sand "
    "swim swam go went goes going walk walked run ran eat ate enjoy enjoyed "
    "get got gets want wanted need needed meet met find found feel felt "
    "sunshine sun warm cold happy sad nice fat big small good great day today "
    "then now finally happily quickly slowly very really gift degree diploma "
    "college school job work home house dog cat treasure story friend "
    "xwant xneed xeffect owant oeffect she he it they her his was were is are"
).split()

SRL_LABELS = ["O", "B-V", "B-Agent", "I-Agent", "B-Theme", "I-Theme", "B-Attribute", "I-Attribute"]


def build_tokenizer() -> PreTrainedTokenizerFast:
    specials = ["<pad>", "<unk>", "<bos>", "<eos>", "<mask>"]
    vocab = {token: index for index, token in enumerate(specials + sorted(set(WORDS)))}
    tokenizer = Tokenizer(models.WordLevel(vocab, unk_token="<unk>"))
    tokenizer.normalizer = normalizers.Lowercase()
    tokenizer.pre_tokenizer = pre_tokenizers.Whitespace()
    return PreTrainedTokenizerFast(
        tokenizer_object=tokenizer,
        pad_token="<pad>", unk_token="<unk>", bos_token="<bos>",
        eos_token="<eos>", mask_token="<mask>",
    )


def roberta_config(vocab_size: int, **extra) -> RobertaConfig:
    return RobertaConfig(
        vocab_size=vocab_size, hidden_size=32, num_hidden_layers=1,
        num_attention_heads=2, intermediate_size=64, max_position_embeddings=512,
        pad_token_id=0, bos_token_id=2, eos_token_id=3, **extra,
    )


def main(out_dir: str | Path) -> Path:
    out = Path(out_dir)
    tokenizer = build_tokenizer()
    vocab_size = tokenizer.vocab_size
    torch.manual_seed(0)

    gpt_config = GPT2Config(
        vocab_size=vocab_size, n_positions=512, n_embd=32, n_layer=1, n_head=2,
        bos_token_id=2, eos_token_id=3, pad_token_id=0,
    )
    checkpoints = {
        "events": GPT2LMHeadModel(gpt_config),
        "score": GPT2LMHeadModel(gpt_config),
        "infill": RobertaForMaskedLM(roberta_config(vocab_size)),
        "similarity": RobertaModel(roberta_config(vocab_size)),
        "srl": RobertaForTokenClassification(roberta_config(
            vocab_size,
            num_labels=len(SRL_LABELS),
            id2label=dict(enumerate(SRL_LABELS)),
            label2id={label: index for index, label in enumerate(SRL_LABELS)},
        )),
    }
    for role, model in checkpoints.items():
        path = out / role
        model.save_pretrained(path)
        tokenizer.save_pretrained(path)
    return out


if __name__ == "__main__":
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        raise SystemExit(2)
    print(main(sys.argv[1]))
