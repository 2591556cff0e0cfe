"""Exception hierarchy shared across the package."""


class StormError(Exception):
    """Base class for all package errors."""


class ValidationError(StormError):
    """Malformed input: empty ids, bad ranges, broken invariants."""


class FixtureError(StormError):
    """Fixture files that cannot be loaded or contain duplicate keys."""


class ProviderError(StormError):
    """A provider call failed (fixture miss policy violations, transport)."""


class TransportError(ProviderError):
    """HTTP transport failure: timeout, bad status, schema violation."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class ExpansionError(StormError):
    """Graph expansion failed; carries the relation being expanded."""

    def __init__(self, relation: str, message: str):
        super().__init__(f"expansion via {relation!r} failed: {message}")
        self.relation = relation


class GenerationError(StormError):
    """Sentence generation failed; carries the offending template index."""

    def __init__(self, message: str, template_index: int | None = None):
        super().__init__(message)
        self.template_index = template_index


class PipelineError(StormError):
    """Pipeline-level failure naming the stage that broke."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
