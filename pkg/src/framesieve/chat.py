"""HTTP chat-completions client shared by the scorer and the classifier.

Wire contract: POST a JSON body of the form::

    {"model": ..., "temperature": 0, "messages": [{"role": "user",
      "content": [{"type": "text", "text": ...},
                  {"type": "image_url", "image_url": {"url": "data:image/jpeg;base64,..."}}]}]}

and read the reply from ``choices[0].message.content``. Auth is a bearer
token taken from an environment variable, never from flags.
"""

from __future__ import annotations

import base64
import json
import os
import time
from dataclasses import dataclass
from typing import Callable, TypeVar

import requests

from .errors import MissingFieldError, NoJsonError

DEFAULT_API_KEY_ENV = "FRAMESIEVE_API_KEY"
DEFAULT_ENDPOINT_ENV = "FRAMESIEVE_ENDPOINT"

T = TypeVar("T")


@dataclass(frozen=True)
class ChatEndpoint:
    """Where and how to reach a chat-completions server."""

    url: str
    model: str = "default"
    api_key_env: str = DEFAULT_API_KEY_ENV
    timeout_s: float = 60.0
    temperature: float = 0.0


@dataclass(frozen=True)
class RetryPolicy:
    """Per-request retry behavior with exponential backoff."""

    attempts: int = 3
    backoff_s: float = 0.5
    backoff_factor: float = 2.0

    def __post_init__(self):
        if self.attempts < 1:
            raise ValueError("attempts must be >= 1")


def with_retries(fn: Callable[[], T], policy: RetryPolicy) -> T:
    """Run ``fn`` up to ``policy.attempts`` times, backing off between tries."""
    delay = policy.backoff_s
    last: Exception | None = None
    for attempt in range(policy.attempts):
        try:
            return fn()
        except Exception as exc:  # noqa: BLE001 - transport and parse errors alike
            last = exc
            if attempt + 1 < policy.attempts and delay > 0:
                time.sleep(delay)
                delay *= policy.backoff_factor
    assert last is not None
    raise last


def text_content(text: str) -> list[dict]:
    return [{"type": "text", "text": text}]


def image_part(image_bytes: bytes) -> dict:
    encoded = base64.b64encode(image_bytes).decode("ascii")
    return {"type": "image_url", "image_url": {"url": f"data:image/jpeg;base64,{encoded}"}}


def chat_complete(endpoint: ChatEndpoint, content: list[dict]) -> str:
    """Send one user message and return the assistant text."""
    headers = {"Content-Type": "application/json"}
    key = os.environ.get(endpoint.api_key_env, "")
    if key:
        headers["Authorization"] = f"Bearer {key}"
    body = {
        "model": endpoint.model,
        "temperature": endpoint.temperature,
        "messages": [{"role": "user", "content": content}],
    }
    resp = requests.post(endpoint.url, json=body, headers=headers, timeout=endpoint.timeout_s)
    resp.raise_for_status()
    data = resp.json()
    try:
        reply = data["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        raise MissingFieldError("response lacks choices[0].message.content") from None
    if not isinstance(reply, str):
        raise MissingFieldError("choices[0].message.content is not text")
    return reply


def extract_first_json(text: str) -> dict:
    """First JSON object embedded in ``text``.

    Tolerates surrounding prose and triple-backtick code fences: scanning
    starts at each ``{`` until one parses as an object.
    """
    if not text:
        raise NoJsonError("empty response text")
    decoder = json.JSONDecoder()
    for pos, char in enumerate(text):
        if char != "{":
            continue
        try:
            obj, _ = decoder.raw_decode(text, pos)
        except ValueError:
            continue
        if isinstance(obj, dict):
            return obj
    raise NoJsonError(f"no JSON object found in {text[:80]!r}")
