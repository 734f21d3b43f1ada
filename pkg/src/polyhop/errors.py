"""Exception types shared across the package."""

from __future__ import annotations


class PolyhopError(Exception):
    """Base class for all package-specific failures."""


class MissingTemplate(PolyhopError):
    """No statement template exists for a (relation, language) pair."""

    def __init__(self, relation: str, language: str) -> None:
        super().__init__(f"no template for relation {relation!r} in language {language!r}")
        self.relation = relation
        self.language = language


class DuplicateEditId(PolyhopError):
    def __init__(self, edit_id: str) -> None:
        super().__init__(f"duplicate edit_id {edit_id!r}")
        self.edit_id = edit_id


class EmptyText(PolyhopError):
    """Text input is empty after trimming."""


class EncoderFailure(PolyhopError):
    """The encoder could not produce a usable embedding."""


class DimensionMismatch(PolyhopError):
    """Vector dimensions disagree with each other or with configuration."""


class RemoteTimeout(PolyhopError):
    """A remote endpoint kept failing transiently until the retry budget ran out."""


class ProtocolError(PolyhopError):
    """A remote endpoint answered with an unexpected status or body shape."""


class InvalidRemoteVector(PolyhopError):
    """A remote embedding contained non-finite entries."""


class EmptyPool(PolyhopError):
    """The entity pool has no candidates for the requested relation slot."""

    def __init__(self, relation: str, slot: str) -> None:
        super().__init__(f"entity pool has no {slot} entries for relation {relation!r}")
        self.relation = relation
        self.slot = slot


class PoolOnlyContainsOriginal(PolyhopError):
    """Every pool candidate equals the entity that must be replaced."""

    def __init__(self, relation: str, slot: str, entity: str) -> None:
        super().__init__(
            f"entity pool for relation {relation!r} offers only the original {slot} {entity!r}"
        )
        self.relation = relation
        self.slot = slot
        self.entity = entity


class NonFiniteLoss(PolyhopError):
    """Training produced a NaN or infinite loss and must abort."""

    def __init__(self, epoch: int, batch: int, value: float) -> None:
        super().__init__(f"non-finite loss {value!r} at epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch
        self.value = value


class FingerprintMismatch(PolyhopError):
    """Query encoder differs from the encoder that built the memory."""


class LlmTransportError(PolyhopError):
    """The LLM endpoint could not be reached or kept answering malformed."""


class SchemaError(PolyhopError):
    """A data file violates its schema; ``pointer`` locates the first violation."""

    def __init__(self, pointer: str, message: str) -> None:
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer

class UnknownWord(PolyhopError):
    """A word has no entry in the pseudo-language lexicon."""

    def __init__(self, word: str, tag: str) -> None:
        super().__init__(f"word {word!r} not in lexicon of pseudo-language {tag!r}")
        self.word = word
        self.tag = tag


class ConfigError(PolyhopError):
    """A run configuration is malformed or internally inconsistent."""
