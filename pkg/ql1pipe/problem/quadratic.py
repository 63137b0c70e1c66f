from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .operator import CountingOperator


@dataclass
class QuadraticProblem:
    """
    Quadratic l1 problem min 0.5 x^T A x - b^T x + tau ||x||_1.

    ### Parameters:
    :param op: CountingOperator representing A.
    :param b: Linear term, length n.
    :param tau: Nonnegative penalty.
    :param validate: Run the symmetry and PSD probes at construction (uncounted).
    :param probe_seed: Seed of the probe vectors.
    """
    op: CountingOperator
    b: np.ndarray
    tau: float
    validate: bool = field(default=True, repr=False)
    probe_seed: int = field(default=0, repr=False)

    def __post_init__(self) -> None:
        self.b = np.ascontiguousarray(self.b, dtype=np.float64).reshape(-1)
        self.tau = float(self.tau)

        if not np.isfinite(self.tau) or self.tau < 0:
            raise ValueError("tau must be a finite nonnegative real, got {}.".format(self.tau))

        if self.b.shape[0] != self.op.n:
            raise ValueError("Dimension mismatch: operator has n={} but b has length {}.".format(self.op.n, self.b.shape[0]))

        if not np.all(np.isfinite(self.b)):
            raise ValueError("b contains non-finite entries.")

        if self.validate:
            self.check_operator()

    @property
    def n(self) -> int:
        return self.op.n

    def check_operator(self, probes: int = 3) -> None:
        """
        Probe the operator for symmetry and positive semidefiniteness without
        charging the MV counter.

        ### Raises:
        - ValueError
          - Raised if a probe violates symmetry or PSD beyond 1e-10 relative slack.
        """
        norm_est = max(self.op.norm_bound(), 1e-300)
        rng = np.random.default_rng(self.probe_seed)
        for _ in range(probes):
            u = rng.standard_normal(self.n); v = rng.standard_normal(self.n)
            Au = self.op._product(u); Av = self.op._product(v)

            if not (np.all(np.isfinite(Au)) and np.all(np.isfinite(Av))):
                raise ValueError("Operator produced non-finite values.")

            if abs(u @ Av - v @ Au) > 1e-10 * np.linalg.norm(u) * np.linalg.norm(v) * norm_est:
                raise ValueError("Operator is not symmetric: |u'Av - v'Au| = {}.".format(abs(u @ Av - v @ Au)))

            if v @ Av < -1e-10 * norm_est * (v @ v):
                raise ValueError("Operator is not positive semidefinite: v'Av = {}.".format(v @ Av))


def _check_length(P: QuadraticProblem, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (P.n,):
        raise ValueError("Dimension mismatch: problem has n={} but x has shape {}.".format(P.n, x.shape))

    return x


def eval_objective(P: QuadraticProblem, x, Ax: Optional[np.ndarray] = None) -> float:
    """
    Evaluate F(x) = 0.5 x^T A x - b^T x + tau ||x||_1.

    ### Parameters:
    :param P: Problem instance.
    :param x: Point of evaluation.
    :param Ax: Cached product A x. When given no MV is consumed.

    ### Returns:
    :return: F(x).
    """
    x = _check_length(P, x)
    if Ax is None:
        Ax = P.op.apply(x)

    return float(0.5 * (x @ Ax) - P.b @ x + P.tau * np.sum(np.abs(x)))


def eval_gradient(P: QuadraticProblem, x, Ax: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Evaluate the smooth gradient g(x) = A x - b (1 MV, 0 with a cached A x).
    """
    x = _check_length(P, x)
    if Ax is None:
        Ax = P.op.apply(x)

    return np.asarray(Ax, dtype=np.float64) - P.b
