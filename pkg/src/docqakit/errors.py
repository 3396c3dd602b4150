"""Exception types shared across the toolkit."""

from __future__ import annotations


class DocqakitError(Exception):
    """Base class for toolkit errors."""


class ValidationError(DocqakitError):
    """Input data or a query failed validation.

    Carries optional source context so file loaders can point at the
    offending element, e.g. ``gt.json: $.[2].relevant[0]: unknown doc id``.
    """

    def __init__(self, reason: str, *, file: str | None = None, path: str | None = None):
        self.reason = reason
        self.file = file
        self.path = path
        parts = [p for p in (file, path, reason) if p]
        super().__init__(": ".join(parts))


class NoKeywordsError(ValidationError):
    """A question yielded no content keywords."""

    def __init__(self, question: str):
        self.question = question
        super().__init__(f"no content keywords in question: {question!r}")


class ConfigurationError(DocqakitError):
    """A pipeline or CLI invocation is missing required inputs."""


class AdapterError(DocqakitError):
    """An external answer adapter failed (transport, timeout, or protocol)."""
