"""Theorem corpus and math problem loading.

Both file formats are JSON-Lines (UTF-8, one object per line):

* corpus:   ``{"id": str, "title": str, "text": str}``
* problems: ``{"id": str, "question": str, "gold_answer": str}``

The tokenizer here is shared by the BM25 index and the hashed text
encoder so that every lexical component sees identical tokens.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

__all__ = [
    "CorpusError",
    "TheoremDoc",
    "MathProblem",
    "Corpus",
    "load_corpus",
    "save_corpus",
    "load_problems",
    "tokenize",
]

# Unicode alphanumeric runs; underscore is treated as a separator.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class CorpusError(ValueError):
    """Malformed corpus or problem file."""


@dataclass
class TheoremDoc:
    """One retrievable document: a theorem statement with an optional title.

    ``summary`` is filled in lazily by self-summarization during tree
    search; it never takes part in indexing.
    """

    id: str
    title: str
    text: str
    summary: str | None = None

    def retrieval_text(self) -> str:
        """Text that gets indexed: title and statement concatenated."""
        if self.title:
            return f"{self.title} {self.text}"
        return self.text


@dataclass
class MathProblem:
    """A natural-language math question with its normalized final answer."""

    id: str
    question: str
    gold_answer: str


@dataclass
class Corpus:
    """An ordered, immutable-by-convention collection of theorem documents.

    ``id_index`` maps every document id to its zero-based position; it is
    derived in ``__post_init__`` and always covers exactly the documents.
    """

    docs: list[TheoremDoc]
    id_index: dict[str, int] = field(init=False)

    def __post_init__(self) -> None:
        index: dict[str, int] = {}
        for pos, doc in enumerate(self.docs):
            if doc.id in index:
                raise CorpusError(f"duplicate document id {doc.id!r}")
            index[doc.id] = pos
        self.id_index = index

    def __len__(self) -> int:
        return len(self.docs)

    def __iter__(self) -> Iterator[TheoremDoc]:
        return iter(self.docs)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.id_index

    def get(self, doc_id: str) -> TheoremDoc:
        try:
            return self.docs[self.id_index[doc_id]]
        except KeyError:
            raise KeyError(f"unknown document id {doc_id!r}") from None

    def position(self, doc_id: str) -> int:
        return self.id_index[doc_id]


def tokenize(text: str) -> list[str]:
    """Case-fold and split on any non-alphanumeric character.

    Digits are kept, empty tokens are dropped, and the result is
    deterministic: ``"R(n_1, n_2)=5"`` becomes
    ``["r", "n", "1", "n", "2", "5"]``.
    """
    return _TOKEN_RE.findall(text.casefold())


def _read_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise CorpusError(f"{path}:{lineno}: expected a JSON object")
        yield lineno, obj


def _require_str(obj: dict, key: str, path: Path | str, lineno: int, *, allow_empty: bool = False) -> str:
    if key not in obj:
        raise CorpusError(f"{path}:{lineno}: missing field {key!r}")
    value = obj[key]
    if not isinstance(value, str):
        raise CorpusError(f"{path}:{lineno}: field {key!r} must be a string")
    if not allow_empty and not value.strip():
        raise CorpusError(f"{path}:{lineno}: field {key!r} must be non-empty")
    return value


def load_corpus(path: str | Path) -> Corpus:
    """Load a JSON-Lines theorem corpus, preserving file order.

    Raises ``CorpusError`` on unreadable files, malformed lines (the line
    number is reported) and duplicate ids (the offending id is named).
    """
    docs: list[TheoremDoc] = []
    seen: dict[str, int] = {}
    for lineno, obj in _read_jsonl(path):
        doc_id = _require_str(obj, "id", path, lineno)
        title = _require_str(obj, "title", path, lineno, allow_empty=True)
        text = _require_str(obj, "text", path, lineno)
        if doc_id in seen:
            raise CorpusError(
                f"{path}:{lineno}: duplicate document id {doc_id!r} (first seen on line {seen[doc_id]})"
            )
        seen[doc_id] = lineno
        summary = obj.get("summary")
        if summary is not None and not isinstance(summary, str):
            raise CorpusError(f"{path}:{lineno}: field 'summary' must be a string")
        docs.append(TheoremDoc(id=doc_id, title=title, text=text, summary=summary))
    return Corpus(docs=docs)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus back to JSON-Lines; inverse of ``load_corpus``."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus:
            record: dict = {"id": doc.id, "title": doc.title, "text": doc.text}
            if doc.summary is not None:
                record["summary"] = doc.summary
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_problems(path: str | Path) -> list[MathProblem]:
    """Load math problems with gold answers, preserving file order.

    Empty questions or answers are rejected with the field named in the
    error; duplicate problem ids are rejected as well.
    """
    problems: list[MathProblem] = []
    seen: set[str] = set()
    for lineno, obj in _read_jsonl(path):
        pid = _require_str(obj, "id", path, lineno)
        question = _require_str(obj, "question", path, lineno)
        gold = _require_str(obj, "gold_answer", path, lineno)
        if pid in seen:
            raise CorpusError(f"{path}:{lineno}: duplicate problem id {pid!r}")
        seen.add(pid)
        problems.append(MathProblem(id=pid, question=question, gold_answer=gold))
    return problems
