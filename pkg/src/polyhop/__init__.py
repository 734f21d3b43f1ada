"""Cross-lingual multi-hop knowledge editing.

The package stores natural-language fact edits in a multilingual memory,
trains a lightweight text encoder so that questions retrieve the right
edit across languages, and orchestrates an LLM to answer multi-hop
questions one sub-question at a time, injecting verified edits into the
prompt as it goes.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import PolyhopError
from .facts import EditMemory, FactEdit, FactTriple, TemplateTable, build_memory, render_statement
from .encoder import BuiltinEncoderParams, HashedNgramEncoder, cosine
from .retrieval import RetrievalResult, retrieve_top1, verify

__all__ = [
    "PolyhopError",
    "FactTriple",
    "FactEdit",
    "TemplateTable",
    "EditMemory",
    "build_memory",
    "render_statement",
    "BuiltinEncoderParams",
    "HashedNgramEncoder",
    "cosine",
    "RetrievalResult",
    "retrieve_top1",
    "verify",
]
