"""Algorithm parameters: the theorem-mode formulas and the desk-scale defaults."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

MAX_M = 63
DEFAULT_REPS_CEILING = 10 ** 6


class ParamError(ValueError):
    pass


class FeasibilityWarning(UserWarning):
    """A parameter derived from the asymptotic formulas is impractical at this n."""


@dataclass(frozen=True)
class AlgoParams:
    """Everything one run of the multistage matcher needs.

    ``threshold_slack=None`` means ``beta / ln ln n``, resolved per instance by
    :meth:`slack_for`.
    """

    beta: float = 0.4
    m: int = 7
    omega: int = 64
    reps: int = 20
    threshold_slack: float | None = None
    mode: str = "practical"
    seed: int = 0
    delta: float | None = None

    def __post_init__(self):
        if self.mode not in ("paper", "practical"):
            raise ParamError(f"mode must be 'paper' or 'practical', got {self.mode!r}")
        if not 0.0 < self.beta < 1.0:
            raise ParamError(f"beta must lie in (0, 1), got {self.beta}")
        if not 1 <= self.m <= MAX_M:
            raise ParamError(f"m must lie in [1, {MAX_M}], got {self.m}")
        if self.omega < 1:
            raise ParamError(f"omega must be >= 1, got {self.omega}")
        if self.omega > 2 ** self.m:
            warnings.warn(f"omega={self.omega} exceeds 2^m={2 ** self.m}; clamped", FeasibilityWarning,
                          stacklevel=3)
            object.__setattr__(self, "omega", 2 ** self.m)
        if self.reps < 1:
            raise ParamError(f"reps must be >= 1, got {self.reps}")
        if self.threshold_slack is not None and self.threshold_slack < 0:
            raise ParamError("threshold_slack must be >= 0")

    def half_beta_n(self, n: int) -> int:
        b = int(math.floor(0.5 * self.beta * n + 1e-9))
        if b < 1:
            raise ParamError(f"0.5*beta*n = {0.5 * self.beta * n:g} leaves B and C empty")
        return b

    def slack_for(self, n: int) -> float:
        if self.threshold_slack is not None:
            return float(self.threshold_slack)
        lln = math.log(math.log(n)) if n > math.e else 0.0
        if lln <= 0:
            raise ParamError(f"default slack beta/ln ln n undefined for n={n}")
        return self.beta / lln

    def with_overrides(self, **kw) -> "AlgoParams":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def practical_params(**overrides) -> AlgoParams:
    """beta=0.4, m=7, omega=64, reps=20, slack=beta/ln ln n, with overrides."""
    return AlgoParams(mode="practical").with_overrides(**overrides)


def paper_params(n: int, delta: float = 0.05, *, seed: int = 0, reps_rule: str = "step6",
                 reps_ceiling: int = DEFAULT_REPS_CEILING) -> AlgoParams:
    """Parameters from the exact-recovery theorem.

    beta is the smallest value >= (ln ln n)^(-6-delta) that makes 0.5*beta*n an
    integer; m = floor(6 log2 ln n); omega = floor((ln n)^(1+2 delta)) clamped
    to 2^m.  ``reps_rule="step6"`` repeats ceil((ln ln n)^2 / beta^4) times,
    ``"proof"`` uses floor((ln n)^2 / beta^4).  A :class:`FeasibilityWarning`
    fires when reps exceeds ``reps_ceiling``.
    """
    if n < 16:
        raise ParamError(f"paper parameters need n >= 16, got {n}")
    if not 0.0 < delta < 0.1:
        raise ParamError(f"delta must lie in (0, 0.1), got {delta}")
    ln = math.log(n)
    lln = math.log(ln)
    beta_floor = lln ** (-6.0 - delta)
    half = math.ceil(0.5 * beta_floor * n - 1e-9)
    beta = 2.0 * half / n
    if beta >= 1.0:
        raise ParamError(f"beta={beta:g} >= 1 at n={n}")
    m = min(MAX_M, int(math.floor(6.0 * math.log2(ln))))
    omega = int(math.floor(ln ** (1.0 + 2.0 * delta)))
    if omega > 2 ** m:
        warnings.warn(f"omega={omega} exceeds 2^m={2 ** m}; clamped", FeasibilityWarning, stacklevel=2)
        omega = 2 ** m
    if reps_rule == "step6":
        reps = math.ceil(lln ** 2 / beta ** 4)
    elif reps_rule == "proof":
        reps = max(1, math.floor(ln ** 2 / beta ** 4))
    else:
        raise ParamError(f"unknown reps_rule {reps_rule!r}")
    if reps > reps_ceiling:
        warnings.warn(f"paper-mode repetition count {reps:.3g} exceeds the feasibility ceiling "
                      f"{reps_ceiling:.3g}", FeasibilityWarning, stacklevel=2)
    return AlgoParams(beta=beta, m=m, omega=omega, reps=reps, threshold_slack=beta / lln,
                      mode="paper", seed=seed, delta=delta)
