from enum import Enum
from typing import Optional

import numpy as np


class OperatorKind(Enum):
    DENSE = 0
    FACTORED = 1


class CountingOperator:
    def __init__(self, kind: OperatorKind, a: Optional[np.ndarray] = None,
                 B: Optional[np.ndarray] = None, gamma: float = 0.0) -> None:
        """
        Matrix-free application of the symmetric PSD matrix A with a monotone
        matrix-vector-product counter. One call to apply is one MV unit,
        regardless of kind.

        ### Parameters:
        :param kind: OperatorKind.DENSE (A stored as a full n x n matrix) or
        OperatorKind.FACTORED (A = B^T B + 2 gamma I, never formed).
        :param a: Dense symmetric matrix. Required for DENSE.
        :param B: m x n factor. Required for FACTORED.
        :param gamma: Nonnegative shift for FACTORED.

        ### Methods:
        - public
          - apply: Return A v and increment the counter.
          - matrix: Dense expansion of A (not counted).
          - norm_bound: Cheap upper bound on the spectral norm of A.
          - fork: Operator sharing the data with a private zero counter.
          - absorb: Merge the count of a forked operator back.
        """
        self.kind = kind
        self.mv_count = 0

        if kind is OperatorKind.DENSE:
            if a is None:
                raise ValueError("Dense operator needs a matrix.")

            a = np.ascontiguousarray(a, dtype=np.float64)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ValueError("Dense operator needs a square matrix, got shape {}.".format(a.shape))

            self.a = a
            self.B = None
            self.gamma = 0.0
            self.n = a.shape[0]

        elif kind is OperatorKind.FACTORED:
            if B is None:
                raise ValueError("Factored operator needs a factor matrix B.")

            B = np.ascontiguousarray(B, dtype=np.float64)
            if B.ndim != 2:
                raise ValueError("Factor B must be a 2-D matrix, got shape {}.".format(B.shape))

            if not np.isfinite(gamma) or gamma < 0:
                raise ValueError("gamma must be a finite nonnegative real, got {}.".format(gamma))

            self.a = None
            self.B = B
            self.gamma = float(gamma)
            self.n = B.shape[1]

        else:
            raise ValueError("Unknown operator kind {}.".format(kind))

    @classmethod
    def dense(cls, a) -> "CountingOperator":
        return cls(OperatorKind.DENSE, a=np.asarray(a, dtype=np.float64))

    @classmethod
    def factored(cls, B, gamma: float = 0.0) -> "CountingOperator":
        return cls(OperatorKind.FACTORED, B=np.asarray(B, dtype=np.float64), gamma=gamma)

    def _product(self, v: np.ndarray) -> np.ndarray:
        if self.kind is OperatorKind.DENSE:
            return self.a @ v

        return self.B.T @ (self.B @ v) + (2.0 * self.gamma) * v

    def apply(self, v) -> np.ndarray:
        """
        Compute A v. Costs exactly one MV unit.

        ### Parameters:
        :param v: Real vector of length n.

        ### Returns:
        :return: A v as a new array.

        ### Raises:
        - ValueError
          - Raised if v does not have length n.
        """
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.n,):
            raise ValueError("Dimension mismatch: operator has n={} but vector has shape {}.".format(self.n, v.shape))

        self.mv_count += 1
        return self._product(v)

    def matrix(self) -> np.ndarray:
        """Dense expansion of A. Not charged to the counter."""
        if self.kind is OperatorKind.DENSE:
            return self.a.copy()

        return self.B.T @ self.B + 2.0 * self.gamma * np.eye(self.n)

    def norm_bound(self) -> float:
        """Upper bound on the spectral norm of A, used as ||A||_est in tolerances."""
        if self.kind is OperatorKind.DENSE:
            return float(np.linalg.norm(self.a, "fro"))

        return float(np.sum(self.B * self.B)) + 2.0 * self.gamma

    def fork(self) -> "CountingOperator":
        """Return an operator sharing this operator's data with its own zero counter."""
        child = CountingOperator.__new__(CountingOperator)
        child.kind = self.kind
        child.a = self.a
        child.B = self.B
        child.gamma = self.gamma
        child.n = self.n
        child.mv_count = 0
        return child

    def absorb(self, child: "CountingOperator") -> None:
        """Add the work done on a forked operator to this counter."""
        self.mv_count += child.mv_count

    def __repr__(self) -> str:
        if self.kind is OperatorKind.DENSE:
            return "CountingOperator(DENSE, n={}, mv_count={})".format(self.n, self.mv_count)

        return "CountingOperator(FACTORED, m={}, n={}, gamma={}, mv_count={})".format(
            self.B.shape[0], self.n, self.gamma, self.mv_count)
