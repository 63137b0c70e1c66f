"""
Executable convergence guarantees. An Auditor is attached to a solve when
SolverConfig.theory_checks is set; it compares every step against the
per-step decrease bounds using an eigenvalue oracle and collects the
violations in the trace instead of raising.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..problem.quadratic import QuadraticProblem
from .subgrad import compute_omega, compute_phi, compute_psi
from .trace import RunTrace, Status, StepType

logger = logging.getLogger(__name__)

SLACK = 1e-10


@dataclass
class TheoryOracle:
    lam_min: float
    L: float
    F_star: float

    @property
    def spd(self) -> bool:
        return self.lam_min > 0.0


def build_oracle(P: QuadraticProblem, F_star: Optional[float] = None) -> TheoryOracle:
    """Dense eigenvalue oracle plus a reference objective. Nothing is charged to P."""
    from .drivers import reference_objective

    eigs = np.linalg.eigvalsh(P.op.matrix())
    if F_star is None:
        F_star = reference_objective(P)

    return TheoryOracle(lam_min=float(eigs[0]), L=float(eigs[-1]), F_star=float(F_star))


def step_beta(c: float, L: float) -> float:
    return min(c, 1.0 / (8.0 * L))


def check_two_step_rate(F_values, oracle: TheoryOracle, beta: float) -> List[str]:
    """
    Check F(x_{k+2}) - F* <= (1 - lambda beta / 2)(F(x_k) - F*) + slack for every k.

    ### Returns:
    :return: One message per violated index.
    """
    F = np.asarray(F_values, dtype=np.float64) - oracle.F_star
    rate = 1.0 - oracle.lam_min * beta / 2.0
    violations = list()
    for k in range(len(F) - 2):
        if F[k + 2] > rate * F[k] + SLACK:
            violations.append("two-step rate violated at k={}: {:.3e} > {:.3e}".format(k, F[k + 2], rate * F[k]))

    return violations


def corollary_mv_bound(trace: RunTrace, oracle: TheoryOracle, beta: float,
                       eps: float = 1e-6) -> Optional[Tuple[Optional[int], float]]:
    """
    Measured MV count to reach F - F* <= eps and the worst-case bound
    log(eps / (F0 - F*)) / log sqrt(1 - lambda beta / 2).

    ### Returns:
    :return: (measured, bound), or None when F0 - F* <= eps already.
    """
    gap0 = trace.records[0].F - oracle.F_star
    if gap0 <= eps:
        return None

    bound = np.log(eps / gap0) / np.log(np.sqrt(1.0 - oracle.lam_min * beta / 2.0))
    measured = None
    for rec in trace.records:
        if rec.F - oracle.F_star <= eps:
            measured = rec.mv
            break

    return measured, float(bound)


class Auditor:
    def __init__(self, oracle: TheoryOracle, c: float) -> None:
        self.oracle = oracle
        self.beta = step_beta(c, oracle.L)
        self.violations = list()
        self.alphas = list()
        if not oracle.spd:
            logger.warning("Theory checks disabled: A is singular (smallest eigenvalue {:.3e}).".format(oracle.lam_min))

    def _gap(self, F: float) -> float:
        return F - self.oracle.F_star

    def first_order(self, k: int, step: StepType, x, g, F_old: float, F_new: float, alpha: float, tau: float,
                    balance: Optional[bool]) -> None:
        psi = compute_psi(x, g, tau, alpha); phi = compute_phi(x, g, tau)
        if np.linalg.norm(psi) > np.linalg.norm(phi) + 1e-12:
            self.violations.append("k={}: ||psi|| {:.3e} > ||phi|| {:.3e}".format(k, np.linalg.norm(psi), np.linalg.norm(phi)))

        if not self.oracle.spd or step is StepType.LSFALLBACK:
            return

        self.alphas.append(alpha)
        if alpha > (1.0 + 1e-12) / self.oracle.L:
            return

        lam_alpha = self.oracle.lam_min * alpha
        if step is StepType.ISTA:
            if self._gap(F_new) > (1.0 - lam_alpha) * self._gap(F_old) + SLACK:
                self.violations.append("k={}: ISTA decrease violated".format(k))

        elif step is StepType.SUBISTA:
            omega = compute_omega(x, g, tau)
            if not (balance and omega @ omega <= psi @ psi):
                return

            if self._gap(F_new) > (1.0 - 0.5 * lam_alpha) * self._gap(F_old) + SLACK:
                self.violations.append("k={}: subspace ISTA decrease violated".format(k))

    def cg_step(self, k: int, F_old: float, F_new: float, v, in_orthant: bool) -> None:
        if not self.oracle.spd or not in_orthant:
            return

        v = np.asarray(v)
        if F_new > F_old - self.beta * float(v @ v) + SLACK:
            self.violations.append("k={}: CG decrease violated".format(k))

    def finish(self, trace: RunTrace) -> None:
        if not self.oracle.spd or trace.algorithm not in ("iicg1", "iicg2"):
            return

        L = self.oracle.L
        if any(a > (1.0 + 1e-12) / L or a < 1.0 / (8.0 * L) for a in self.alphas):
            logger.info("Two-step rate not audited: steplengths outside [1/(8L), 1/L].")
            return

        self.violations.extend(check_two_step_rate(trace.F_values, self.oracle, self.beta))

        if trace.status is Status.CONVERGED:
            result = corollary_mv_bound(trace, self.oracle, self.beta)
            if result is not None:
                measured, bound = result
                if measured is not None and measured > bound:
                    self.violations.append("MV count {} exceeds the worst-case bound {:.1f}".format(measured, bound))
