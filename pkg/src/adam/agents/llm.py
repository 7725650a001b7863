"""Language-model client contract, deterministic mocks, HTTP backend.

A backend turns an LLMRequest into plain response text. The two mocks
are pure functions of the request, which makes the whole pipeline a
pure function of (dataset, seed, configuration) and lets tests pin
end-to-end behavior without network access:

* ``TitleEchoMock`` replays the step titles it finds in the prompt, so
  title order is observable in the output.
* ``ThresholdMockLLM`` reads the machine-readable probability and
  fallback-threshold lines out of the prompt and answers with exactly
  the verdict a hard threshold on the ensemble would produce.

Token accounting uses ceil(characters / 4) everywhere; budgets are
enforced by the pipeline before dispatch.
"""

from __future__ import annotations

import math
import os
import re
import time
from dataclasses import dataclass

import requests

from ..errors import BackendError, VerdictParseError

API_KEY_VARIABLE = "ADAM_LLM_API_KEY"
MAX_ATTEMPTS = 5
BACKOFF_BASE_SECONDS = 1.0
BACKOFF_FACTOR = 2.0

PROBABILITY_PATTERN = re.compile(
    r"^Model probability of AD: [0-9.]+% \(p=([0-9eE+.-]+)\)$", re.MULTILINE)
THRESHOLD_PATTERN = re.compile(
    r"^Fallback decision threshold: ([0-9eE+.-]+)$", re.MULTILINE)
VERDICT_PATTERN = re.compile(r"^Prediction: (Yes|No)(?:\s*-.*)?$")
STEP_TITLE_PATTERN = re.compile(r"^## Step [1-8]: (.+)$", re.MULTILINE)


def estimate_tokens(text: str) -> int:
    """Backend-agnostic token estimate: ceil(characters / 4)."""
    return math.ceil(len(text) / 4)


def probability_line(probability: float) -> str:
    """The machine-readable probability line embedded in prompts."""
    return (f"Model probability of AD: {100.0 * probability:.2f}% "
            f"(p={probability:.17g})")


def threshold_line(threshold: float) -> str:
    return f"Fallback decision threshold: {threshold:.17g}"


def parse_verdict(text: str) -> str:
    """Extract Yes/No from the first line; anything else is an error."""
    if not isinstance(text, str) or not text.strip():
        raise VerdictParseError("empty model reply", raw=text or "")
    first = text.strip().splitlines()[0].strip()
    match = VERDICT_PATTERN.match(first)
    if match is None:
        raise VerdictParseError(
            f"first line {first!r} does not match 'Prediction: (Yes|No)'",
            raw=text)
    return match.group(1)


@dataclass(frozen=True)
class LLMRequest:
    model: str
    system: str
    user: str
    max_output_tokens: int = 1024
    temperature: float = 0.0


class LLMBackend:
    """Contract: complete() maps one request to one response text."""

    name: str = "abstract"

    def complete(self, request: LLMRequest) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class StaticMock(LLMBackend):
    """Always answers with the same text (error-path testing)."""

    reply: str
    name: str = "static-mock"

    def complete(self, request: LLMRequest) -> str:
        return self.reply


@dataclass(frozen=True)
class TitleEchoMock(LLMBackend):
    """Summarization mock: echoes every step title found in the prompt,
    in prompt order, one acknowledgment line per step."""

    name: str = "title-echo-mock"

    def complete(self, request: LLMRequest) -> str:
        titles = STEP_TITLE_PATTERN.findall(request.user)
        lines = ["Summary of the visit:"]
        lines.extend(f"{i}. {title}: reviewed."
                     for i, title in enumerate(titles, start=1))
        return "\n".join(lines)


@dataclass(frozen=True)
class ThresholdMockLLM(LLMBackend):
    """Classification mock: verdict = (probability >= threshold).

    Both numbers are parsed from the prompt's machine-readable lines at
    full precision, so with this backend the pipeline's verdicts are
    exactly a hard threshold on the deployed ensemble.
    """

    name: str = "threshold-mock"

    def complete(self, request: LLMRequest) -> str:
        prob = PROBABILITY_PATTERN.search(request.user)
        thresh = THRESHOLD_PATTERN.search(request.user)
        if prob is None:
            raise BackendError("prompt lacks the model-probability line")
        if thresh is None:
            raise BackendError("prompt lacks the fallback-threshold line")
        verdict = "Yes" if float(prob.group(1)) >= float(thresh.group(1)) else "No"
        return f"Prediction: {verdict}"


class HttpChatBackend(LLMBackend):
    """Chat-completion-style HTTP backend.

    Sends {model, messages, max_tokens, temperature}; reads the first
    choice's message content. Credential from ADAM_LLM_API_KEY unless
    passed explicitly. Retries transport errors and 429/5xx responses
    with exponential backoff (1s base, doubling, 5 attempts).
    """

    def __init__(self, url: str, model: str,
                 api_key: str | None = None,
                 timeout: float = 120.0,
                 max_attempts: int = MAX_ATTEMPTS,
                 session=None,
                 sleeper=time.sleep):
        self.url = url
        self.model = model
        self.timeout = timeout
        self.max_attempts = max_attempts
        self._api_key = api_key
        self._session = session if session is not None else requests.Session()
        self._sleep = sleeper

    @property
    def name(self) -> str:
        return f"http-{self.model}"

    def _credential(self) -> str:
        key = self._api_key or os.environ.get(API_KEY_VARIABLE, "")
        if not key:
            raise BackendError(
                f"no API key: pass api_key or set {API_KEY_VARIABLE}")
        return key

    def complete(self, request: LLMRequest) -> str:
        payload = {
            "model": request.model or self.model,
            "messages": [{"role": "system", "content": request.system},
                         {"role": "user", "content": request.user}],
            "max_tokens": request.max_output_tokens,
            "temperature": request.temperature,
        }
        headers = {"Authorization": f"Bearer {self._credential()}"}
        delay = BACKOFF_BASE_SECONDS
        last = "no attempt made"
        for attempt in range(1, self.max_attempts + 1):
            try:
                response = self._session.post(self.url, json=payload,
                                              headers=headers,
                                              timeout=self.timeout)
            except requests.RequestException as exc:
                last = f"transport error: {exc}"
            else:
                if response.status_code == 200:
                    return self._parse(response.json())
                last = f"HTTP {response.status_code}"
                if response.status_code < 500 and response.status_code != 429:
                    raise BackendError(
                        f"chat request rejected after {attempt} attempt(s): {last}")
            if attempt < self.max_attempts:
                self._sleep(delay)
                delay *= BACKOFF_FACTOR
        raise BackendError(
            f"chat request failed after {self.max_attempts} attempts: {last}")

    @staticmethod
    def _parse(doc) -> str:
        try:
            content = doc["choices"][0]["message"]["content"]
        except (TypeError, KeyError, IndexError) as exc:
            raise BackendError(f"malformed chat response: {exc}") from exc
        if not isinstance(content, str):
            raise BackendError("chat response content is not text")
        return content
