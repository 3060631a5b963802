"""Error types and resource budgets shared across the package.

Every judgment-free failure gets its own exception class so callers (and the
command line driver) can map failures to stable machine-readable error codes:

- precondition violations  -> PreconditionError  (exit code 2)
- exhausted compute budget -> BudgetExceededError (exit code 3)
- infeasible optimization  -> InfeasibleRegionError
- unbounded optimization   -> UnboundedObjectiveError
- certificate mismatch     -> VerificationError
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field


class CubearcError(Exception):
    """Base class; `code` is the stable identifier used on the wire."""

    code = "error"

    def payload(self) -> dict:
        return {"code": self.code, "message": str(self)}


class PreconditionError(CubearcError):
    code = "precondition"


class BudgetExceededError(CubearcError):
    code = "budget-exceeded"


class InfeasibleRegionError(CubearcError):
    code = "infeasible-region"


class UnboundedObjectiveError(CubearcError):
    code = "unbounded-objective"


class VerificationError(CubearcError):
    code = "verification-failed"


DEFAULT_EVAL_LIMIT = 10**9
DEFAULT_TABLE_LIMIT = 10**8


def _env_eval_limit() -> int:
    raw = os.environ.get("CUBEARC_BUDGET")
    if raw is None:
        return DEFAULT_EVAL_LIMIT
    try:
        value = int(raw)
    except ValueError:
        raise PreconditionError(f"CUBEARC_BUDGET must be an integer, got {raw!r}")
    if value <= 0:
        raise PreconditionError("CUBEARC_BUDGET must be positive")
    return value


@dataclass
class Budget:
    """Mutable meter for point evaluations and table entries.

    `spend` is called before work happens, so a single oversized request
    fails fast instead of half-running.
    """

    eval_limit: int = field(default_factory=_env_eval_limit)
    table_limit: int = DEFAULT_TABLE_LIMIT
    evals_used: int = 0
    table_peak: int = 0

    def spend(self, n: int, what: str = "evaluation") -> None:
        if n < 0:
            raise PreconditionError("budget spend must be nonnegative")
        if self.evals_used + n > self.eval_limit:
            raise BudgetExceededError(
                f"{what} budget exceeded: need {self.evals_used + n}, "
                f"limit {self.eval_limit}"
            )
        self.evals_used += n

    def table(self, n: int, what: str = "table") -> None:
        if n > self.table_limit:
            raise BudgetExceededError(
                f"{what} budget exceeded: need {n} entries, limit {self.table_limit}"
            )
        self.table_peak = max(self.table_peak, n)

    def snapshot(self) -> dict:
        return {
            "eval_limit": self.eval_limit,
            "table_limit": self.table_limit,
            "evals_used": self.evals_used,
            "table_peak": self.table_peak,
        }
