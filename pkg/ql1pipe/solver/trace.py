from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
import pandas as pd

TRACE_COLUMNS = ["mv", "k", "F", "nnz", "step"]


class StepType(Enum):
    INIT = "INIT"
    ISTA = "ISTA"
    SUBISTA = "SUBISTA"
    CG = "CG"
    CUTBACK = "CUTBACK"
    LSFALLBACK = "LSFALLBACK"

    @property
    def first_order(self) -> bool:
        return self in (StepType.ISTA, StepType.SUBISTA, StepType.LSFALLBACK)

    @property
    def subspace(self) -> bool:
        return self in (StepType.CG, StepType.CUTBACK)


class Status(Enum):
    CONVERGED = "Converged"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    STALLED = "Stalled"


@dataclass
class Record:
    mv: int
    k: int
    F: float
    nnz: int
    step: StepType
    seconds: float = 0.0


@dataclass
class RunTrace:
    """
    Per-step history of a solve.

    Records are written at accepted iterates only. Record.mv is the cumulative
    MV count at acceptance, so the gap between consecutive records includes
    rejected line-search trials, and the INIT record carries the power
    iteration. Cutback records may repeat the previous count.

    ### Parameters:
    :param records: One Record per constitutive step, starting with INIT.
    :param final_x: Returned iterate (best iterate when the budget ran out).
    :param status: Status of the solve.
    :param algorithm: Name of the solver that produced the trace.
    :param L_est: Largest-eigenvalue estimate used by the solve.
    :param mv_L: MV units spent estimating L.
    :param violations: Theory-audit messages (empty unless theory checks ran).
    :param F_final: Objective value at final_x.
    """
    records: List[Record] = field(default_factory=list)
    final_x: Optional[np.ndarray] = None
    status: Status = Status.BUDGET_EXHAUSTED
    algorithm: str = ""
    L_est: float = float("nan")
    mv_L: int = 0
    violations: List[str] = field(default_factory=list)
    F_final: float = float("nan")

    @property
    def mv_total(self) -> int:
        return self.records[-1].mv if self.records else 0

    @property
    def F_values(self) -> np.ndarray:
        return np.array([rec.F for rec in self.records])

    def steps(self) -> List[StepType]:
        return [rec.step for rec in self.records]

    def first_mv_at(self, accuracy_fn, tol: float) -> Optional[int]:
        """MV count of the first record whose accuracy_fn(F) <= tol, or None."""
        for rec in self.records:
            if accuracy_fn(rec.F) <= tol:
                return rec.mv

        return None

    def to_frame(self, seconds: bool = False) -> pd.DataFrame:
        """Trace as a DataFrame with columns mv,k,F,nnz,step (and seconds when asked)."""
        df = pd.DataFrame({"mv": [r.mv for r in self.records], "k": [r.k for r in self.records],
                           "F": [r.F for r in self.records], "nnz": [r.nnz for r in self.records],
                           "step": [r.step.value for r in self.records]}, columns=TRACE_COLUMNS)
        if seconds:
            df["seconds"] = [r.seconds for r in self.records]

        return df

    @classmethod
    def from_frame(cls, df: pd.DataFrame) -> "RunTrace":
        missing = [c for c in TRACE_COLUMNS if c not in df.columns]
        if missing != []:
            raise ValueError("Trace table is missing columns {}.".format(", ".join(missing)))

        has_seconds = "seconds" in df.columns
        records = list()
        for row in df.itertuples(index=False):
            records.append(Record(mv=int(row.mv), k=int(row.k), F=float(row.F), nnz=int(row.nnz),
                                  step=StepType(str(row.step).upper()),
                                  seconds=float(row.seconds) if has_seconds else 0.0))

        return cls(records=records, F_final=records[-1].F if records else float("nan"))
