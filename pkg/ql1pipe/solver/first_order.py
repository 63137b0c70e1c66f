import dataclasses
import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

from ..problem.quadratic import QuadraticProblem, eval_objective
from .subgrad import compute_psi, softthreshold

logger = logging.getLogger(__name__)


class StepMode(Enum):
    FULL = "full"
    SUBSPACE = "subspace"


@dataclass
class LineSearchMemory:
    """
    Nonmonotone line-search memory: the M most recent accepted objective
    values (newest first), the sufficient-decrease constant xi and the
    halving limit.
    """
    window: np.ndarray
    xi: float = 0.005
    max_halvings: int = 60

    @classmethod
    def seeded(cls, F0: float, M: int = 5, xi: float = 0.005, max_halvings: int = 60) -> "LineSearchMemory":
        if M < 1:
            raise ValueError("Line-search memory M must be a positive integer, got {}.".format(M))

        if not np.isfinite(F0):
            raise ValueError("Line-search memory needs a finite seed value, got {}.".format(F0))

        return cls(window=np.full(M, float(F0)), xi=xi, max_halvings=max_halvings)

    @property
    def reference(self) -> float:
        return float(np.max(self.window))

    def shifted(self, F: float) -> "LineSearchMemory":
        """Return the memory with F shifted in as the newest value and the oldest dropped."""
        window = np.empty_like(self.window)
        window[1:] = self.window[:-1]
        window[0] = F
        return dataclasses.replace(self, window=window)


class BBStep(NamedTuple):
    x_next: np.ndarray
    mem: LineSearchMemory
    mv_used: int
    Ax: np.ndarray
    F: float
    alpha: float
    fallback: bool


def ista_step(x, g, tau: float, alpha: float) -> np.ndarray:
    """
    Full proximal gradient step softthreshold(x - alpha g, alpha tau).

    ### Parameters:
    :param x: Current iterate.
    :param g: Smooth gradient A x - b at x.
    :param tau: l1 penalty.
    :param alpha: Positive steplength.

    ### Returns:
    :return: The new iterate.
    """
    x = np.asarray(x, dtype=np.float64); g = np.asarray(g, dtype=np.float64)
    if not alpha > 0:
        raise ValueError("alpha must be positive, got {}.".format(alpha))

    if x.shape != g.shape:
        raise ValueError("Dimension mismatch: x has shape {} but g has shape {}.".format(x.shape, g.shape))

    return softthreshold(x - alpha * g, alpha * tau)


def subspace_ista_step(x, g, tau: float, alpha: float) -> np.ndarray:
    """ISTA restricted to the nonzero coordinates of x; zeros stay exactly zero."""
    x = np.asarray(x, dtype=np.float64)
    x_next = x - alpha * compute_psi(x, g, tau, alpha)
    x_next[x == 0] = 0.0
    return x_next


def bb_steplength(x, x_prev: Optional[np.ndarray], g, g_prev: Optional[np.ndarray], alpha_fallback: float,
                  alpha_min: float = 1e-30, alpha_max: float = 1e30) -> float:
    """
    Barzilai-Borwein steplength s's / s'y with s = x - x_prev and y = g - g_prev = A s.
    Falls back to alpha_fallback without a usable curvature pair. Costs no MV.
    """
    if x_prev is None or g_prev is None:
        return alpha_fallback

    s = np.asarray(x, dtype=np.float64) - x_prev
    y = np.asarray(g, dtype=np.float64) - g_prev
    ss = float(s @ s); sy = float(s @ y)
    if ss == 0.0 or not sy > 0.0 or not np.isfinite(ss / sy):
        return alpha_fallback

    return float(np.clip(ss / sy, alpha_min, alpha_max))


def ista_bb_ls(x, x_prev: Optional[np.ndarray], g, g_prev: Optional[np.ndarray], mode: StepMode,
               mem: LineSearchMemory, P: QuadraticProblem, L_est: float,
               alpha_min: float = 1e-30, alpha_max: float = 1e30) -> BBStep:
    """
    ISTA step with a Barzilai-Borwein steplength and a nonmonotone line search.

    The steplength is halved until F(x_F) <= max(window) - alpha xi ||x - x_F||^2,
    each trial costing one MV. After mem.max_halvings halvings the step with
    1/L_est is accepted unconditionally and flagged as a fallback.

    ### Parameters:
    :param x: Current iterate.
    :param x_prev: Previous distinct iterate, or None on the first step.
    :param g: Gradient at x.
    :param g_prev: Gradient at x_prev, or None.
    :param mode: StepMode.FULL uses ista_step, StepMode.SUBSPACE uses subspace_ista_step.
    :param mem: Line-search memory.
    :param P: Problem; trial evaluations go through its counting operator.
    :param L_est: Estimate of the largest eigenvalue of A.

    ### Returns:
    :return: BBStep(x_next, mem, mv_used, Ax, F, alpha, fallback), where Ax = A x_next and F = F(x_next).
    """
    x = np.asarray(x, dtype=np.float64); g = np.asarray(g, dtype=np.float64)
    step = ista_step if mode is StepMode.FULL else subspace_ista_step
    alpha_fallback = 1.0 / L_est
    alpha = bb_steplength(x, x_prev, g, g_prev, alpha_fallback, alpha_min, alpha_max)
    reference = mem.reference

    mv_used = 0
    for _ in range(mem.max_halvings + 1):
        x_F = step(x, g, P.tau, alpha)
        Ax_F = P.op.apply(x_F); mv_used += 1
        F_F = eval_objective(P, x_F, Ax_F)
        d = x - x_F
        if F_F <= reference - alpha * mem.xi * float(d @ d):
            return BBStep(x_F, mem.shifted(F_F), mv_used, Ax_F, F_F, alpha, False)

        alpha *= 0.5

    logger.warning("Line search exceeded {} halvings; taking the 1/L step {:.3e}.".format(mem.max_halvings, alpha_fallback))
    x_F = step(x, g, P.tau, alpha_fallback)
    Ax_F = P.op.apply(x_F); mv_used += 1
    F_F = eval_objective(P, x_F, Ax_F)
    return BBStep(x_F, mem.shifted(F_F), mv_used, Ax_F, F_F, alpha_fallback, True)
