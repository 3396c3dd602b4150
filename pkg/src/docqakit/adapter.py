"""Wire protocol and drivers for external extractive-QA adapters.

Answering is delegated to an external process that extracts a span from
a (question, context) pair.  The protocol is one JSON object per
message: requests carry ``{id, question, context}``, responses
``{id, answer, score, start, end}`` (or ``{id, error}`` on failure),
newline-delimited over stdio or one object per HTTP POST.  Responses
match requests by id, so pipelined transports stay safe.

A deterministic in-process echo stub ships here so pipelines are
testable without any model process.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import shlex
import subprocess
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass
from queue import Empty, Queue
from typing import Callable, Iterable, Protocol, Sequence, runtime_checkable

from .context import serialize_context
from .errors import AdapterError, ConfigurationError
from .textspot import DocumentOcr

__all__ = [
    "ADAPTER_ENV_VAR",
    "AnswerAdapter",
    "CallableAdapter",
    "EchoStubAdapter",
    "HttpAdapter",
    "SpanAnswer",
    "StdioAdapter",
    "answer_documents",
    "decode_request",
    "decode_response",
    "encode_error",
    "encode_request",
    "encode_response",
    "resolve_adapter",
]

logger = logging.getLogger(__name__)

ADAPTER_ENV_VAR = "DOCQAKIT_ADAPTER"

_REQUEST_IDS = itertools.count(1)


@dataclass(frozen=True)
class SpanAnswer:
    """An extracted answer span with the adapter's confidence score.

    ``start_char``/``end_char`` delimit the span in the context string,
    end exclusive; when provided, ``context[start_char:end_char]`` must
    equal ``text``.
    """

    text: str
    score: float
    start_char: int | None = None
    end_char: int | None = None

    def __post_init__(self):
        if not isinstance(self.score, (int, float)) or isinstance(self.score, bool):
            raise ValueError(f"score must be a real number, got {self.score!r}")
        if not math.isfinite(self.score):
            raise ValueError(f"score must be finite, got {self.score!r}")
        object.__setattr__(self, "score", float(self.score))
        if (self.start_char is None) != (self.end_char is None):
            raise ValueError("start_char and end_char must be provided together")
        if self.start_char is not None:
            if any(isinstance(i, bool) or not isinstance(i, int)
                   for i in (self.start_char, self.end_char)):
                raise ValueError("span indices must be integers")
            if self.start_char < 0 or self.end_char < self.start_char:
                raise ValueError(
                    f"need 0 <= start_char <= end_char, got ({self.start_char}, {self.end_char})"
                )


def encode_request(request_id: str, question: str, context: str) -> str:
    """One request as a single JSON line (no trailing newline)."""
    return json.dumps(
        {"id": request_id, "question": question, "context": context},
        ensure_ascii=False, sort_keys=True,
    )


def decode_request(line: str) -> tuple[str, str, str]:
    """Parse a request line to (id, question, context)."""
    payload = _parse_object(line, "request")
    for key in ("id", "question", "context"):
        if key not in payload:
            raise AdapterError(f"request missing key {key!r}: {line!r}")
        if not isinstance(payload[key], str):
            raise AdapterError(f"request key {key!r} must be a string: {line!r}")
    return payload["id"], payload["question"], payload["context"]


def encode_response(request_id: str, span: SpanAnswer) -> str:
    """One response as a single JSON line (no trailing newline)."""
    return json.dumps(
        {
            "id": request_id,
            "answer": span.text,
            "score": span.score,
            "start": span.start_char,
            "end": span.end_char,
        },
        ensure_ascii=False, sort_keys=True,
    )


def encode_error(request_id: str, message: str) -> str:
    """An error response for a request that could not be answered."""
    return json.dumps({"id": request_id, "error": message}, ensure_ascii=False, sort_keys=True)


def _parse_object(line: str, what: str) -> dict:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise AdapterError(f"unparseable {what} line: {line!r} ({exc})") from exc
    if not isinstance(payload, dict):
        raise AdapterError(f"{what} must be a JSON object, got: {line!r}")
    return payload


def decode_response(line: str) -> tuple[str, SpanAnswer]:
    """Parse a response line to (id, SpanAnswer).

    An ``{id, error}`` payload raises AdapterError carrying the message;
    so does any structural violation.
    """
    payload = _parse_object(line, "response")
    request_id = payload.get("id")
    if not isinstance(request_id, str):
        raise AdapterError(f"response missing string id: {line!r}")
    if "error" in payload:
        raise AdapterError(f"adapter error for request {request_id}: {payload['error']}")
    for key in ("answer", "score", "start", "end"):
        if key not in payload:
            raise AdapterError(f"response missing key {key!r}: {line!r}")
    answer = payload["answer"]
    if not isinstance(answer, str):
        raise AdapterError(f"response answer must be a string: {line!r}")
    try:
        span = SpanAnswer(
            text=answer,
            score=payload["score"],
            start_char=payload["start"],
            end_char=payload["end"],
        )
    except ValueError as exc:
        raise AdapterError(f"invalid response payload: {line!r} ({exc})") from exc
    return request_id, span


@runtime_checkable
class AnswerAdapter(Protocol):
    """Anything that answers one (question, context) pair per call."""

    def answer(self, request_id: str, question: str, context: str) -> SpanAnswer: ...


class CallableAdapter:
    """Wraps a plain ``fn(question, context) -> SpanAnswer``."""

    def __init__(self, fn: Callable[[str, str], SpanAnswer]):
        self._fn = fn

    def answer(self, request_id: str, question: str, context: str) -> SpanAnswer:
        return self._fn(question, context)


class EchoStubAdapter:
    """Deterministic test double: answers with the first context token.

    Scores everything 1.0; an empty context yields an empty span, which
    answer assembly drops.
    """

    def answer(self, request_id: str, question: str, context: str) -> SpanAnswer:
        parts = context.split()
        if not parts:
            return SpanAnswer("", 0.0, 0, 0)
        first = parts[0]
        start = context.index(first)
        return SpanAnswer(first, 1.0, start, start + len(first))


class StdioAdapter:
    """Drives a subprocess speaking newline-delimited JSON on stdio.

    The process starts lazily on first use and stays up across calls.
    Calls are serialized under a lock, so one instance is safe to share
    across pipeline threads.  Usable as a context manager.
    """

    def __init__(self, command: Sequence[str] | str, timeout: float = 30.0):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.command:
            raise ConfigurationError("stdio adapter needs a non-empty command")
        self.timeout = timeout
        self._lock = threading.Lock()
        self._process: subprocess.Popen | None = None
        self._lines: Queue = Queue()

    def _pump(self, stdout) -> None:
        for line in stdout:
            self._lines.put(line)

    def _ensure_started(self) -> None:
        if self._process is not None and self._process.poll() is None:
            return
        try:
            self._process = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise AdapterError(f"cannot start adapter {self.command!r}: {exc}") from exc
        threading.Thread(target=self._pump, args=(self._process.stdout,), daemon=True).start()

    def answer(self, request_id: str, question: str, context: str) -> SpanAnswer:
        with self._lock:
            self._ensure_started()
            try:
                self._process.stdin.write(encode_request(request_id, question, context) + "\n")
                self._process.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise AdapterError(f"adapter process closed its stdin: {exc}") from exc
            while True:
                try:
                    line = self._lines.get(timeout=self.timeout)
                except Empty:
                    raise AdapterError(
                        f"adapter timed out after {self.timeout}s on request {request_id}"
                    ) from None
                line = line.strip()
                if not line:
                    continue
                response_id, span = decode_response(line)
                if response_id != request_id:
                    raise AdapterError(
                        f"adapter answered request {response_id!r} while awaiting {request_id!r}"
                    )
                return span

    def close(self) -> None:
        if self._process is not None and self._process.poll() is None:
            self._process.terminate()
            try:
                self._process.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._process.kill()
        self._process = None

    def __enter__(self) -> "StdioAdapter":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


class HttpAdapter:
    """POSTs one request object per call to an HTTP endpoint."""

    def __init__(self, url: str, timeout: float = 30.0):
        self.url = url
        self.timeout = timeout

    def answer(self, request_id: str, question: str, context: str) -> SpanAnswer:
        body = encode_request(request_id, question, context).encode("utf-8")
        request = urllib.request.Request(
            self.url, data=body, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                payload = response.read().decode("utf-8")
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            raise AdapterError(f"adapter POST to {self.url} failed: {exc}") from exc
        response_id, span = decode_response(payload)
        if response_id != request_id:
            raise AdapterError(
                f"adapter answered request {response_id!r} while awaiting {request_id!r}"
            )
        return span


def resolve_adapter(endpoint: "str | AnswerAdapter | None") -> AnswerAdapter:
    """Turn an endpoint description into a live adapter.

    Accepts an adapter instance as-is, or a string: ``stub`` for the
    built-in echo stub, ``stdio:<command>`` for a subprocess, or an
    http(s) URL.  ``None`` falls back to the DOCQAKIT_ADAPTER
    environment variable.
    """
    import os

    if endpoint is None:
        endpoint = os.environ.get(ADAPTER_ENV_VAR)
    if endpoint is None:
        raise ConfigurationError(
            f"no adapter endpoint: pass one or set {ADAPTER_ENV_VAR}"
        )
    if not isinstance(endpoint, str):
        if isinstance(endpoint, AnswerAdapter):
            return endpoint
        raise ConfigurationError(f"not an adapter: {endpoint!r}")
    if endpoint in ("stub", "stub:echo"):
        return EchoStubAdapter()
    if endpoint.startswith("stdio:"):
        return StdioAdapter(endpoint[len("stdio:"):])
    if endpoint.startswith(("http://", "https://")):
        return HttpAdapter(endpoint)
    raise ConfigurationError(
        f"unrecognized adapter endpoint {endpoint!r}; "
        "expected 'stub', 'stdio:<command>', or an http(s) URL"
    )


def _check_span(span: SpanAnswer, context: str) -> None:
    if span.start_char is None:
        return
    sliced = context[span.start_char:span.end_char]
    if sliced != span.text:
        raise AdapterError(
            f"span indices ({span.start_char}, {span.end_char}) slice to {sliced!r}, "
            f"not the answer {span.text!r}"
        )


def answer_documents(
    question: str,
    docs: Sequence[DocumentOcr],
    relevant: Iterable[str],
    adapter: "str | AnswerAdapter",
    line_tolerance_factor: float = 0.5,
) -> list[str]:
    """Collect one answer list by querying the adapter over the relevant
    documents.

    For each relevant document, in the given (ranking) order: serialize
    its context, send (question, context), and take the answer span.
    Answers come back deduplicated, ordered by adapter score descending
    (document order breaks ties).  Empty spans contribute nothing.

    A failing document is logged and skipped; only all documents failing
    raises.  Zero relevant documents yield an empty list.
    """
    resolved = resolve_adapter(adapter)
    doc_list = list(docs)
    relevant_ids = set(relevant)
    unknown = sorted(relevant_ids - {d.doc_id for d in doc_list})
    if unknown:
        raise ValueError(f"relevant ids missing from docs: {unknown}")
    targets = [d for d in doc_list if d.doc_id in relevant_ids]
    if not targets:
        return []
    scored: list[tuple[float, int, str]] = []
    failures = 0
    first_failure: AdapterError | None = None
    for order, doc in enumerate(targets):
        context = serialize_context(doc, line_tolerance_factor)
        request_id = f"{doc.doc_id}#{next(_REQUEST_IDS)}"
        try:
            span = resolved.answer(request_id, question, context)
            _check_span(span, context)
        except AdapterError as exc:
            logger.warning("adapter failed on document %s: %s", doc.doc_id, exc)
            failures += 1
            first_failure = first_failure or exc
            continue
        if span.text:
            scored.append((span.score, order, span.text))
    if failures == len(targets):
        raise AdapterError(
            f"adapter failed on all {failures} relevant documents; first error: {first_failure}"
        )
    scored.sort(key=lambda item: (-item[0], item[1]))
    return list(dict.fromkeys(text for _, _, text in scored))
