"""One wrapper per neural role, each built from a loaded checkpoint.

All decoding is greedy or beam search so identical requests yield identical
responses; sampling is opt-in per request on the event-inference role.
"""

from __future__ import annotations

import torch

MASK = "<mask>"


def _banned_token_ids(tokenizer) -> list[int]:
    ids = {tokenizer.mask_token_id, tokenizer.pad_token_id, tokenizer.unk_token_id}
    return [i for i in ids if i is not None]


class EventInferencer:
    """Relation-conditioned continuations of an event phrase."""

    def __init__(self, model, tokenizer, device: str, max_new_tokens: int):
        self.model = model
        self.tokenizer = tokenizer
        self.device = device
        self.max_new_tokens = max_new_tokens

    @torch.no_grad()
    def infer(self, text: str, relations: list[str], beam: int, sample: bool = False) -> list[dict]:
        results: list[dict] = []
        for relation in relations:
            prompt = f"{text} {relation}"
            encoded = self.tokenizer(prompt, return_tensors="pt").to(self.device)
            prompt_len = encoded["input_ids"].shape[1]
            out = self.model.generate(
                **encoded,
                max_new_tokens=self.max_new_tokens,
                num_beams=max(1, beam) if not sample else 1,
                num_return_sequences=beam,
                do_sample=sample,
                output_scores=True,
                return_dict_in_generate=True,
                pad_token_id=self.tokenizer.pad_token_id or self.tokenizer.eos_token_id,
            )
            if self.model.config.is_encoder_decoder:
                continuations = out.sequences
            else:
                continuations = out.sequences[:, prompt_len:]
            kwargs = {"normalize_logits": True}
            if getattr(out, "beam_indices", None) is not None:
                kwargs["beam_indices"] = out.beam_indices
            transition = self.model.compute_transition_scores(out.sequences, out.scores, **kwargs)
            rows = []
            for sequence, scores in zip(continuations, transition):
                decoded = self.tokenizer.decode(sequence, skip_special_tokens=True).strip()
                if not decoded:
                    continue
                finite = scores[torch.isfinite(scores)]
                rows.append({"relation": relation, "text": decoded, "score": float(finite.sum())})
            rows.sort(key=lambda r: (-r["score"], r["text"]))
            results.extend(rows[:beam])
        return results


class Infiller:
    """Left-to-right greedy completion of mask sentinels in a template."""

    def __init__(self, model, tokenizer, device: str):
        self.model = model
        self.tokenizer = tokenizer
        self.device = device

    @torch.no_grad()
    def infill(self, context: str, template: str) -> tuple[str, float]:
        if MASK not in template:
            return template, 0.0
        prepared = template.replace(MASK, self.tokenizer.mask_token)
        context_ids = self.tokenizer(context, add_special_tokens=False)["input_ids"] if context.strip() else []
        template_ids = self.tokenizer(prepared, add_special_tokens=False)["input_ids"]
        input_ids = torch.tensor([context_ids + template_ids], device=self.device)
        template_start = len(context_ids)
        banned = _banned_token_ids(self.tokenizer)

        score = 0.0
        mask_id = self.tokenizer.mask_token_id
        while True:
            positions = (input_ids[0] == mask_id).nonzero(as_tuple=True)[0]
            positions = [int(p) for p in positions if int(p) >= template_start]
            if not positions:
                break
            position = positions[0]
            logits = self.model(input_ids=input_ids).logits[0, position]
            logits[banned] = float("-inf")
            log_probs = torch.log_softmax(logits, dim=-1)
            chosen = int(log_probs.argmax())
            score += float(log_probs[chosen])
            input_ids[0, position] = chosen
        filled = self.tokenizer.decode(input_ids[0, template_start:], skip_special_tokens=True).strip()
        return filled, score


class SequenceScorer:
    """Per-token conditional log-probabilities of a continuation."""

    def __init__(self, model, tokenizer, device: str):
        self.model = model
        self.tokenizer = tokenizer
        self.device = device

    @torch.no_grad()
    def token_logprobs(self, context: str, continuation: str) -> list[float]:
        prefix = [self.tokenizer.bos_token_id] if self.tokenizer.bos_token_id is not None else []
        context_ids = self.tokenizer(context, add_special_tokens=False)["input_ids"] if context.strip() else []
        continuation_ids = self.tokenizer(continuation, add_special_tokens=False)["input_ids"]
        if not continuation_ids:
            return []
        ids = prefix + context_ids + continuation_ids
        input_ids = torch.tensor([ids], device=self.device)
        logits = self.model(input_ids=input_ids).logits[0]
        log_probs = torch.log_softmax(logits, dim=-1)
        start = len(prefix) + len(context_ids)
        out = []
        for offset, token_id in enumerate(continuation_ids):
            position = start + offset
            if position == 0:
                out.append(0.0)  # nothing to condition on without a BOS token
                continue
            out.append(float(log_probs[position - 1, token_id]))
        return out


class Embedder:
    """Mean-pooled sentence embeddings; cosine mapped onto [0, 1]."""

    def __init__(self, model, tokenizer, device: str):
        self.model = model
        self.tokenizer = tokenizer
        self.device = device

    @torch.no_grad()
    def _embed(self, texts: list[str]) -> torch.Tensor:
        encoded = self.tokenizer(list(texts), return_tensors="pt", padding=True, truncation=True).to(self.device)
        hidden = self.model(**encoded).last_hidden_state
        mask = encoded["attention_mask"].unsqueeze(-1)
        pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1)
        return torch.nn.functional.normalize(pooled, dim=-1)

    def similarity(self, a: list[str], b: list[str]) -> list[list[float]]:
        cosine = self._embed(a) @ self._embed(b).T
        unit = (1.0 + cosine) / 2.0
        return [[float(x) for x in row] for row in unit]


class SrlTagger:
    """BIO token classification grouped into frames and role arguments.

    The frame name is the upper-cased verb span; a production checkpoint
    supplies the role inventory through its id2label map.
    """

    def __init__(self, model, tokenizer, device: str):
        self.model = model
        self.tokenizer = tokenizer
        self.device = device

    @torch.no_grad()
    def records(self, sentence: str) -> list[dict]:
        encoded = self.tokenizer(sentence, add_special_tokens=False, return_offsets_mapping=True,
                                 return_tensors="pt", truncation=True)
        offsets = encoded.pop("offset_mapping")[0].tolist()
        if not offsets:
            return []
        encoded = {k: v.to(self.device) for k, v in encoded.items()}
        logits = self.model(**encoded).logits[0]
        labels = [self.model.config.id2label[int(i)] for i in logits.argmax(dim=-1)]

        spans = self._bio_spans(labels, offsets, sentence)
        verbs = [text for role, text in spans if role == "V"]
        args = {role: text for role, text in spans if role != "V"}
        return [
            {"frame": "_".join(verb.upper().split()), "args": dict(args)}
            for verb in verbs
        ]

    @staticmethod
    def _bio_spans(labels: list[str], offsets: list[list[int]], sentence: str) -> list[tuple[str, str]]:
        spans: list[tuple[str, int, int]] = []  # (role, start, end)
        for label, (start, end) in zip(labels, offsets):
            if label == "O" or "-" not in label:
                continue
            prefix, role = label.split("-", 1)
            if prefix == "I" and spans and spans[-1][0] == role:
                spans[-1] = (role, spans[-1][1], end)
            else:
                spans.append((role, start, end))
        return [(role, sentence[start:end]) for role, start, end in spans if sentence[start:end].strip()]
