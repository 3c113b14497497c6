"""Generation backends, prompt templates, and answer checking.

Templates live as JSON assets under ``assets/prompts/`` and are rendered
with a conservative substitution: only the known placeholder names
(``question``, ``partial_solution``, ``theorem``, ``few_shots``) are
replaced, so literal braces in math text pass through untouched.

Two backends are provided: a scripted mock for tests and offline runs,
and a chat-completions-style HTTP client. The mock's script file is
JSON-Lines of ``{"match": prompt-substring, "responses": [str, ...]}``;
the first entry whose ``match`` occurs in the prompt wins, and its
responses are consumed in order (a decoding seed offsets the cycle, so
equal (prompt, seed) pairs on a fresh backend yield equal text).
"""

from __future__ import annotations

import json
import re
import threading
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import requests

__all__ = [
    "DecodingParams",
    "PromptTemplate",
    "TEMPLATE_IDS",
    "get_template",
    "render_prompt",
    "PromptError",
    "BackendError",
    "GenBackend",
    "MockBackend",
    "HttpBackend",
    "generate",
    "extract_boxed_answer",
    "verify_answer",
    "parse_relevance",
]

TEMPLATE_IDS = (
    "ost",
    "crs",
    "query_gen",
    "self_reflection",
    "self_summarization",
    "llm_query",
    "lexical_query",
)

_CONTEXT_PLACEHOLDERS = ("question", "partial_solution", "theorem")
_PLACEHOLDER_RE = re.compile(r"\{(" + "|".join(_CONTEXT_PLACEHOLDERS + ("few_shots",)) + r")\}")


class PromptError(KeyError):
    """Unknown template or missing placeholder value."""


class BackendError(RuntimeError):
    """Generation failed: transport error, empty completion, or no script match."""


@dataclass(frozen=True)
class DecodingParams:
    """Sampling parameters passed to a generation backend.

    Defaults follow the generation settings used for tree search:
    temperature 0.8, top-k 40, top-p 0.95.
    """

    temperature: float = 0.8
    top_k: int = 40
    top_p: float = 0.95
    max_tokens: int = 512
    stop: tuple[str, ...] = ()
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.top_k < 0:
            raise ValueError("top_k must be >= 0 (0 disables it)")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError("top_p must be in (0, 1]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    text: str
    few_shots: tuple[str, ...]

    def placeholders(self) -> set[str]:
        """Context names the template expects (``few_shots`` excluded)."""
        names = {m.group(1) for m in _PLACEHOLDER_RE.finditer(self.text)}
        names.discard("few_shots")
        return names


_template_cache: dict[str, PromptTemplate] = {}


def get_template(template_id: str) -> PromptTemplate:
    if template_id not in TEMPLATE_IDS:
        raise PromptError(f"unknown template id {template_id!r}")
    cached = _template_cache.get(template_id)
    if cached is None:
        ref = resources.files("treemine") / "assets" / "prompts" / f"{template_id}.json"
        payload = json.loads(ref.read_text(encoding="utf-8"))
        cached = PromptTemplate(
            template_id=payload["template_id"],
            text=payload["text"],
            few_shots=tuple(payload["few_shots"]),
        )
        _template_cache[template_id] = cached
    return cached


def render_prompt(template_id: str, context: dict[str, str]) -> str:
    """Render a template byte-deterministically.

    Every placeholder the template references must be present in
    ``context``; a missing one raises ``PromptError`` naming it. The
    template's own few-shot block fills ``{few_shots}``.
    """
    template = get_template(template_id)
    needed = template.placeholders()
    for name in sorted(needed):
        if name not in context:
            raise PromptError(f"template {template_id!r} is missing placeholder {name!r}")
    values = dict(context)
    values["few_shots"] = "\n\n".join(template.few_shots)

    def _substitute(match: re.Match[str]) -> str:
        return values[match.group(1)]

    return _PLACEHOLDER_RE.sub(_substitute, template.text)


class GenBackend:
    """Behavioral contract for text generation backends."""

    backend_id: str = "base"

    def generate(self, prompt: str, params: DecodingParams) -> str:
        raise NotImplementedError


def generate(backend: GenBackend, prompt: str, params: DecodingParams) -> str:
    """Run one completion; raw text is returned and the caller parses it."""
    text = backend.generate(prompt, params)
    if not text:
        raise BackendError(f"{backend.backend_id}: empty completion")
    return text


@dataclass
class _MockEntry:
    match: str
    responses: list[str]
    counter: int = 0


class MockBackend(GenBackend):
    """Deterministic scripted backend.

    Matching is first-entry-wins substring search, so order entries from
    most to least specific; an entry with ``"match": ""`` acts as a
    catch-all. Safe under concurrent calls.
    """

    backend_id = "mock"

    def __init__(self, entries: list[dict]):
        self._entries: list[_MockEntry] = []
        for i, raw in enumerate(entries):
            if "match" not in raw or "responses" not in raw:
                raise ValueError(f"mock entry {i} needs 'match' and 'responses'")
            responses = list(raw["responses"])
            if not responses:
                raise ValueError(f"mock entry {i} has no responses")
            self._entries.append(_MockEntry(match=str(raw["match"]), responses=responses))
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> "MockBackend":
        entries = []
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                entries.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid mock script line ({exc.msg})") from exc
        return cls(entries)

    def generate(self, prompt: str, params: DecodingParams) -> str:
        with self._lock:
            for entry in self._entries:
                if entry.match in prompt:
                    offset = params.seed or 0
                    text = entry.responses[(entry.counter + offset) % len(entry.responses)]
                    entry.counter += 1
                    return text
        raise BackendError(f"mock: no script entry matches prompt starting {prompt[:80]!r}")


class HttpBackend(GenBackend):
    """Chat-completions-style HTTP client with one retry."""

    backend_id = "http"

    def __init__(
        self,
        endpoint: str,
        model: str,
        auth_token: str | None = None,
        timeout: float = 60.0,
        retry_delay: float = 0.5,
    ):
        self.endpoint = endpoint
        self.model = model
        self.auth_token = auth_token
        self.timeout = timeout
        self.retry_delay = retry_delay

    def generate(self, prompt: str, params: DecodingParams) -> str:
        payload: dict = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_tokens": params.max_tokens,
        }
        if params.top_k > 0:
            payload["top_k"] = params.top_k
        if params.stop:
            payload["stop"] = list(params.stop)
        if params.seed is not None:
            payload["seed"] = params.seed
        headers = {"Content-Type": "application/json"}
        if self.auth_token:
            headers["Authorization"] = f"Bearer {self.auth_token}"

        last_error: Exception | None = None
        for attempt in range(2):
            if attempt:
                time.sleep(self.retry_delay * (2 ** (attempt - 1)))
            try:
                resp = requests.post(
                    self.endpoint, json=payload, headers=headers, timeout=self.timeout
                )
                resp.raise_for_status()
                body = resp.json()
                text = body["choices"][0]["message"]["content"]
                if not text:
                    raise BackendError("http: empty completion")
                return text
            except BackendError:
                raise
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_error = exc
        raise BackendError(f"http: generation failed after 2 attempts: {last_error}") from last_error


def extract_boxed_answer(text: str) -> str | None:
    r"""Content of the last ``\boxed{...}``, whitespace-trimmed.

    Brace matching is balance-aware, so nested groups such as
    ``\boxed{\sqrt{5}}`` yield ``\sqrt{5}``. Returns None when no
    occurrence exists or the last one is unbalanced.
    """
    marker = r"\boxed{"
    start = text.rfind(marker)
    if start < 0:
        return None
    depth = 1
    i = start + len(marker)
    while i < len(text):
        ch = text[i]
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start + len(marker) : i].strip()
        i += 1
    return None


def _normalize_answer(answer: str) -> str:
    out = answer
    for junk in ("\\left", "\\right", "$"):
        out = out.replace(junk, "")
    return "".join(out.split())


def _parse_number(text: str) -> Fraction | None:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return Fraction(float(text))
    except (ValueError, OverflowError):
        return None


def verify_answer(predicted: str, gold: str) -> bool:
    """Match a predicted final answer against the gold answer.

    Normalization strips whitespace, ``$``, ``\\left`` and ``\\right``;
    when both sides parse as rationals or decimals they are compared
    numerically with tolerance 1e-9, otherwise the normalized strings
    must match exactly.
    """
    if not gold:
        raise ValueError("gold answer must be non-empty")
    p_norm = _normalize_answer(predicted)
    g_norm = _normalize_answer(gold)
    p_num = _parse_number(p_norm)
    g_num = _parse_number(g_norm)
    if p_num is not None and g_num is not None:
        return abs(float(p_num - g_num)) <= 1e-9
    return p_norm == g_norm


_TRUE_TOKENS = {"true", "relevant", "yes"}
_FALSE_TOKENS = {"false", "non-relevant", "nonrelevant", "irrelevant", "no"}


def parse_relevance(completion: str) -> tuple[bool, str]:
    """Read a self-reflection verdict; unparseable output is non-relevant.

    Scans for a line starting with ``Relevant:`` and reads a
    case-insensitive true/false (or relevant/non-relevant) token. When
    the completion starts right after the prompt's own ``Relevant:``
    label, the first line carries the bare token instead. The text after
    a ``Reason:`` line is returned for the ledger.
    """
    relevant: bool | None = None
    reason = ""
    lines = completion.splitlines()
    for line in lines:
        stripped = line.strip()
        lower = stripped.lower()
        if relevant is None and lower.startswith("relevant:"):
            token = stripped.split(":", 1)[1].strip().strip(".").lower()
            relevant = token in _TRUE_TOKENS
        elif lower.startswith("reason:") and not reason:
            reason = stripped.split(":", 1)[1].strip()
    if relevant is None:
        for line in lines:
            token = line.strip().strip(".").lower()
            if token:
                relevant = token in _TRUE_TOKENS
                break
    return bool(relevant), reason
