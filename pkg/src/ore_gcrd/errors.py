"""Structured algorithmic failures (distinct from usage errors)."""

from __future__ import annotations

from typing import Any


class AlgorithmError(RuntimeError):
    """A numerical algorithm could not produce a trustworthy answer.

    ``kind`` is a short machine-readable tag such as ``"coprime"``,
    ``"rank_gap"``, ``"ill_conditioned"``, ``"no_division"``,
    ``"divergence"`` or ``"degenerate_jacobian"``.
    """

    def __init__(self, kind: str, message: str, **details: Any) -> None:
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.details = details

    def to_json(self) -> dict:
        out: dict = {"error": self.kind, "message": self.message}
        for k, v in self.details.items():
            out[k] = v.to_json() if hasattr(v, "to_json") else v
        return out
