"""
Projected conjugate gradient on the orthant model

    q(x; x_cg) = 0.5 x'Ax + (-b + tau sgn(x_cg))'x

over the subspace of coordinates that are nonzero at the cycle anchor x_cg,
with the cutback used when a step leaves the anchor orthant.
"""
import dataclasses
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..problem.operator import CountingOperator
from .subgrad import sgn


class CurvatureBreak(ArithmeticError):
    """Raised when d'Ad is too small to take a CG step."""


@dataclass
class CGState:
    x: np.ndarray
    r: np.ndarray
    rho: np.ndarray
    d: np.ndarray
    x_cg: np.ndarray
    rho_dot: float
    last_Ad: Optional[np.ndarray] = None
    last_alpha: float = 0.0

    @property
    def free(self) -> np.ndarray:
        return self.x_cg != 0


def init_cg_cycle(x, g, tau: float) -> CGState:
    """
    Start a CG cycle anchored at x.

    ### Parameters:
    :param x: Current iterate (becomes the anchor x_cg).
    :param g: Smooth gradient A x - b at x.
    :param tau: l1 penalty.

    ### Returns:
    :return: CGState with r = g + tau sgn(x), rho = P(r), d = -rho.
    """
    x = np.array(x, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    r = g + tau * sgn(x)
    rho = np.where(x != 0, r, 0.0)
    return CGState(x=x, r=r, rho=rho, d=-rho, x_cg=x.copy(), rho_dot=float(r @ rho))


def cg_step(s: CGState, op: CountingOperator, eps_curv: Optional[float] = None) -> Tuple[CGState, bool]:
    """
    One projected CG iteration. Costs one MV.

    ### Parameters:
    :param s: Current cycle state. Not modified.
    :param op: Counting operator for A.
    :param eps_curv: Curvature threshold; defaults to 1e-14 ||A||_est.

    ### Returns:
    :return: (new state, crossed) where crossed is True when sgn(x') differs from sgn(x_cg).

    ### Raises:
    - CurvatureBreak
      - Raised if d'Ad <= eps_curv ||d||^2.
    """
    if eps_curv is None:
        eps_curv = 1e-14 * op.norm_bound()

    Ad = op.apply(s.d)
    dAd = float(s.d @ Ad); dd = float(s.d @ s.d)
    if dd == 0.0 or dAd <= eps_curv * dd:
        raise CurvatureBreak("d'Ad = {:.3e} <= {:.3e} ||d||^2".format(dAd, eps_curv))

    alpha = s.rho_dot / dAd
    x = s.x + alpha * s.d
    r = s.r + alpha * Ad
    rho = np.where(s.free, r, 0.0)
    rho_dot = float(r @ rho)
    d = -rho + (rho_dot / s.rho_dot) * s.d

    crossed = bool(np.any(sgn(x) != sgn(s.x_cg)))
    return CGState(x=x, r=r, rho=rho, d=d, x_cg=s.x_cg, rho_dot=rho_dot, last_Ad=Ad, last_alpha=alpha), crossed


def cutback_length(x_k, x_cg, d) -> float:
    """
    Largest alpha_b keeping x_k + alpha_b d on the closed orthant of x_cg.
    d is the unscaled CG direction, so alpha_b may exceed 1. Returns 0 when
    x_k itself is off the anchor orthant and inf when no coordinate would cross.
    """
    x_k = np.asarray(x_k, dtype=np.float64); x_cg = np.asarray(x_cg, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)

    if np.any(sgn(x_k) != sgn(x_cg)):
        return 0.0

    crossing = _crossing(x_k, x_cg, d)
    if not np.any(crossing):
        return float("inf")

    return float(np.min(-x_k[crossing] / d[crossing]))


def _crossing(x_k, x_cg, d) -> np.ndarray:
    s_cg = sgn(x_cg)
    return (s_cg != 0) & (sgn(d) == -s_cg) & (x_k * d < 0)


def cutback(x_k, x_cg, d) -> np.ndarray:
    """
    Truncate the ray x_k + alpha d at the boundary of the orthant of x_cg.
    Coordinates reaching the boundary are snapped to exactly 0.0.

    ### Returns:
    :return: x_k + alpha_b d; x_k unchanged when sgn(x_k) != sgn(x_cg); the full
    step x_k + d when no coordinate crosses.
    """
    x_k = np.asarray(x_k, dtype=np.float64); x_cg = np.asarray(x_cg, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    alpha_b = cutback_length(x_k, x_cg, d)
    if alpha_b == 0.0:
        return x_k.copy()

    if np.isinf(alpha_b):
        x = x_k + d

    else:
        x = x_k + alpha_b * d
        crossing = _crossing(x_k, x_cg, d)
        ratio = -x_k / np.where(crossing, d, 1.0)
        # every coordinate whose boundary lies within rounding of alpha_b lands on it
        x[crossing & (ratio <= alpha_b * (1.0 + 4.0 * np.finfo(np.float64).eps))] = 0.0

    x[sgn(x) != sgn(x_cg)] = 0.0
    return x


def orthant_model_value(x, x_cg, Ax, b, tau: float) -> float:
    """Orthant model q(x; x_cg); equals F(x) whenever sgn(x) = sgn(x_cg). No MV."""
    x = np.asarray(x, dtype=np.float64)
    return float(0.5 * (x @ np.asarray(Ax)) + (-np.asarray(b) + tau * sgn(x_cg)) @ x)


def sufficient_decrease(F_next: float, F_curr: float, v_curr, c: float) -> bool:
    v_curr = np.asarray(v_curr, dtype=np.float64)
    return bool(F_next <= F_curr - c * float(v_curr @ v_curr))


def residual_gap(s: CGState, op: CountingOperator, b, tau: float) -> float:
    """
    ||r - (Ax - b + tau sgn(x_cg))|| recomputed with an explicit product on a
    forked operator, so the solve is not charged.
    """
    Ax = op.fork().apply(s.x)
    return float(np.linalg.norm(s.r - (Ax - np.asarray(b) + tau * sgn(s.x_cg))))
