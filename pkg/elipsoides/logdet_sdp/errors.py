# elipsoides/logdet_sdp/errors.py
from __future__ import annotations


class SdpError(Exception):
    """Erro genérico do resolvedor log-det."""


class ModelError(SdpError):
    """Modelo mal formado (dimensões, variável desconhecida, objetivo)."""


class SolverError(SdpError):
    """O resolvedor terminou sem status optimal."""

    def __init__(self, message: str, solution=None):
        super().__init__(message)
        self.solution = solution

    @property
    def status(self) -> str | None:
        return getattr(self.solution, "status", None)
