"""Pluggable text-completion clients.

The contract is a single request/response call:
``complete(system_prompt, user_messages, model_name, temperature) -> str``.
`HttpCompletionClient` speaks an OpenAI-style chat-completions endpoint;
the stub clients are deterministic stand-ins used in tests and offline
runs (same inputs, byte-identical outputs).
"""

from __future__ import annotations

import hashlib
import json
import os
from typing import Protocol, Sequence

import httpx

from .errors import GenerationTransportError

LLM_KEY_ENV = "FACIHUB_LLM_KEY"


class CompletionClient(Protocol):
    def complete(self, system_prompt: str, user_messages: Sequence[str],
                 model_name: str, temperature: float) -> str:
        ...


class HttpCompletionClient:
    """Chat-completions transport; credentials come from FACIHUB_LLM_KEY."""

    def __init__(self, endpoint: str, timeout_seconds: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout_seconds = timeout_seconds

    def complete(self, system_prompt: str, user_messages: Sequence[str],
                 model_name: str, temperature: float) -> str:
        messages = [{"role": "system", "content": system_prompt}]
        messages += [{"role": "user", "content": m} for m in user_messages]
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(LLM_KEY_ENV)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        payload = {"model": model_name, "messages": messages, "temperature": temperature}
        try:
            response = httpx.post(f"{self.endpoint}/chat/completions",
                                  json=payload, headers=headers,
                                  timeout=self.timeout_seconds)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise GenerationTransportError(f"completion request failed: {exc}") from exc
        try:
            body = response.json()
            return body["choices"][0]["message"]["content"]
        except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
            raise GenerationTransportError(f"malformed completion response: {exc}") from exc


def _digest(*parts: str) -> bytes:
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode("utf-8"))
        h.update(b"\x1f")
    return h.digest()


class StubReplyClient:
    """Deterministic reply generator honoring the structured-output contract.

    Role choice keys off the target excerpt: long, concrete contributions
    draw the amplifying role when enabled, short ones the guiding role;
    otherwise the first enabled role applies.
    """

    def __init__(self, enabled_roles: Sequence[str] = ("Guide", "Amplifier")):
        self.enabled_roles = list(enabled_roles)

    def complete(self, system_prompt: str, user_messages: Sequence[str],
                 model_name: str, temperature: float) -> str:
        prompt = user_messages[-1] if user_messages else ""
        body = prompt.split("\n", 1)[-1]
        if "Amplifier" in self.enabled_roles and len(body) > 400:
            role = "Amplifier"
        elif "Guide" in self.enabled_roles:
            role = "Guide"
        else:
            role = self.enabled_roles[0]
        tag = _digest(prompt).hex()[:8]
        if role == "Amplifier":
            text = (f"Thanks for laying out the concrete steps here (ref {tag}). "
                    "The way you sequence the activity is worth copying. Which part "
                    "took the longest to get right, and what would you tell a "
                    "colleague trying it for the first time?")
        else:
            text = (f"This raises a question I keep returning to (ref {tag}). "
                    "Could you say more about what happened in your own classroom? "
                    "A specific example would help the rest of us compare notes.")
        return f"reply_role: {role}\nreply_text: {text}"


class StubCoderClient:
    """Deterministic presence coder: derives 0-3 coded indicator lines from a
    hash of the record text embedded in the prompt."""

    _MARKER = "Record text:\n"

    def __init__(self, indicators: Sequence[str] = ()):  # filled lazily
        from .presence import INDICATORS

        self.indicators = list(indicators) or list(INDICATORS)

    def complete(self, system_prompt: str, user_messages: Sequence[str],
                 model_name: str, temperature: float) -> str:
        prompt = user_messages[-1] if user_messages else ""
        text = prompt.split(self._MARKER, 1)[-1]
        digest = _digest(text.strip())
        n_units = digest[0] % 4  # 0..3 units
        if n_units == 0:
            return "none"
        lines = []
        used = set()
        for i in range(n_units):
            idx = digest[1 + 2 * i] % len(self.indicators)
            if idx in used:
                continue
            used.add(idx)
            salience = "primary" if digest[2 + 2 * i] % 2 == 0 else "secondary"
            lines.append(f"{self.indicators[idx]} {salience}")
        return "\n".join(lines) if lines else "none"


class ScriptedClient:
    """Returns queued outputs in order; raises queued exceptions. Test aid."""

    def __init__(self, outputs: Sequence[str | Exception]):
        self._outputs = list(outputs)
        self.calls: list[tuple[str, tuple[str, ...]]] = []

    def complete(self, system_prompt: str, user_messages: Sequence[str],
                 model_name: str, temperature: float) -> str:
        self.calls.append((system_prompt, tuple(user_messages)))
        if not self._outputs:
            raise AssertionError("ScriptedClient exhausted")
        item = self._outputs.pop(0)
        if isinstance(item, Exception):
            raise item
        return item
