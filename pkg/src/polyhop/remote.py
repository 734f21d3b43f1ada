"""Client for OpenAI-compatible embedding endpoints.

The wire shape is ``POST {"input": [text, ...], "model": name}`` with a
response of ``{"data": [{"embedding": [...]}, ...]}``. Vectors are
validated (finite, expected dimension) and L2-normalized so downstream
code sees the same contract as the built-in encoder.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np
import requests

from .errors import DimensionMismatch, InvalidRemoteVector, ProtocolError, RemoteTimeout

logger = logging.getLogger(__name__)

# transport(url, payload, headers, timeout) -> (status_code, parsed_body)
Transport = Callable[[str, dict, dict, float], tuple[int, Any]]


@dataclass
class RemoteEncoderConfig:
    endpoint: str
    model: str
    dim: int
    api_key_env: str = "POLYHOP_EMBED_API_KEY"
    timeout_s: float = 10.0
    retries: int = 3
    backoff_s: float = 0.5

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.retries < 0:
            raise ValueError("retries must be non-negative")


def _requests_transport(url: str, payload: dict, headers: dict, timeout: float) -> tuple[int, Any]:
    response = requests.post(url, json=payload, headers=headers, timeout=timeout)
    try:
        body = response.json()
    except ValueError as exc:
        raise ProtocolError(f"non-JSON response from {url}") from exc
    return response.status_code, body


class RemoteEncoder:
    """Embeds text through a remote endpoint, with retry on transient failure.

    Transient failures (timeouts, connection errors, HTTP 5xx) are retried
    up to ``config.retries`` times with exponential backoff; anything else
    fails fast as :class:`ProtocolError`.
    """

    def __init__(
        self,
        config: RemoteEncoderConfig,
        transport: Transport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.config = config
        self._transport = transport or _requests_transport
        self._sleep = sleep

    @property
    def dim(self) -> int:
        return self.config.dim

    @property
    def fingerprint(self) -> str:
        return f"remote:{self.config.model}:d{self.config.dim}"

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.config.api_key_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _post(self, payload: dict) -> Any:
        attempts = self.config.retries + 1
        last_exc: Exception | None = None
        for attempt in range(attempts):
            if attempt:
                self._sleep(self.config.backoff_s * (2 ** (attempt - 1)))
            try:
                status, body = self._transport(
                    self.config.endpoint, payload, self._headers(), self.config.timeout_s
                )
            except (requests.Timeout, requests.ConnectionError, TimeoutError) as exc:
                last_exc = exc
                logger.warning("embedding attempt %d/%d failed: %s", attempt + 1, attempts, exc)
                continue
            if 500 <= status < 600:
                last_exc = ProtocolError(f"server error {status} from {self.config.endpoint}")
                logger.warning("embedding attempt %d/%d got HTTP %d", attempt + 1, attempts, status)
                continue
            if status != 200:
                raise ProtocolError(f"unexpected HTTP {status} from {self.config.endpoint}")
            return body
        raise RemoteTimeout(
            f"embedding endpoint failed {attempts} attempts: {last_exc}"
        ) from last_exc

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim), dtype=np.float64)
        body = self._post({"input": list(texts), "model": self.config.model})
        try:
            rows = body["data"]
            vectors = [row["embedding"] for row in rows]
        except (TypeError, KeyError) as exc:
            raise ProtocolError("response body missing data[*].embedding") from exc
        if len(vectors) != len(texts):
            raise ProtocolError(f"expected {len(texts)} embeddings, got {len(vectors)}")
        out = np.empty((len(texts), self.dim), dtype=np.float64)
        for i, vec in enumerate(vectors):
            arr = np.asarray(vec, dtype=np.float64)
            if arr.ndim != 1 or arr.shape[0] != self.dim:
                raise DimensionMismatch(
                    f"remote embedding {i} has shape {arr.shape}, expected ({self.dim},)"
                )
            if not np.all(np.isfinite(arr)):
                raise InvalidRemoteVector(f"remote embedding {i} contains non-finite entries")
            norm = float(np.linalg.norm(arr))
            if norm == 0.0:
                raise InvalidRemoteVector(f"remote embedding {i} is the zero vector")
            out[i] = arr / norm
        return out

    def embed(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]
