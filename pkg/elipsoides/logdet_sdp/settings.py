# elipsoides/logdet_sdp/settings.py
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class SolverSettings:
    """
    Parâmetros do método de barreira.
    Ordem de precedência: defaults daqui < settings.LOGDET_SDP < overrides explícitos.
    """

    t0: float = 1.0
    t_factor: float = 10.0
    gap_tol: float = 1e-9
    accept_gap: float = 1e-6
    stall_tol: float = 1e-8
    newton_tol: float = 1e-10
    max_newton: int = 800
    max_stage_newton: int = 60
    feas_tol: float = 1e-7
    cond_limit: float = 1e14
    ls_alpha: float = 0.01
    ls_beta: float = 0.5
    phase1_max_newton: int = 300

    @classmethod
    def from_settings(cls, **overrides) -> "SolverSettings":
        values: dict = {}
        try:
            from django.conf import settings

            if settings.configured:
                values.update(getattr(settings, "LOGDET_SDP", {}) or {})
        except ImportError:
            pass
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(values)

    @classmethod
    def from_dict(cls, data: dict) -> "SolverSettings":
        known = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, value in data.items():
            key = key.lower()
            if key not in known:
                continue
            default = getattr(cls, key)
            kwargs[key] = int(value) if isinstance(default, int) else float(value)
        return cls(**kwargs)

    def with_tol(self, tol: float | None) -> "SolverSettings":
        """Aplica a flag --tol: tolerância de viabilidade e de gap ao mesmo tempo."""
        if tol is None:
            return self
        return replace(self, feas_tol=float(tol), accept_gap=max(float(tol), self.gap_tol))

    def to_dict(self) -> dict:
        return asdict(self)
