"""
Decomposition of the minimum-norm subgradient of F into the zero-coordinate
part omega, the scaled prox displacement psi and the smooth-plus-sign part phi.

Zero classification uses numeric equality with 0.0, so -0.0 and +0.0 behave
identically (sgn(0) = 0).
"""
from dataclasses import dataclass

import numpy as np


@dataclass
class SubgradientParts:
    omega: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    v: np.ndarray
    alpha_used: float


def _check(x, g):
    x = np.asarray(x, dtype=np.float64); g = np.asarray(g, dtype=np.float64)
    if x.shape != g.shape:
        raise ValueError("Dimension mismatch: x has shape {} but g has shape {}.".format(x.shape, g.shape))

    return x, g


def sgn(x: np.ndarray) -> np.ndarray:
    """Sign with sgn(0) = 0 and the IEEE sign bit of zero ignored."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x == 0, 0.0, np.sign(x))


def softthreshold(z: np.ndarray, t) -> np.ndarray:
    return np.maximum(np.abs(z) - t, 0.0) * sgn(z)


def compute_omega(x, g, tau: float) -> np.ndarray:
    """
    Subgradient components on zero coordinates of x that violate |g_i| <= tau.

    ### Returns:
    :return: omega_i = g_i - tau sgn(g_i) where x_i = 0 and |g_i| > tau, 0 otherwise.
    """
    x, g = _check(x, g)
    omega = np.where((x == 0) & (np.abs(g) > tau), g - tau * sgn(g), 0.0)
    return omega


def compute_psi(x, g, tau: float, alpha: float) -> np.ndarray:
    """
    Scaled prox displacement on nonzero coordinates of x,
    psi_i = (x_i - softthreshold(x_i - alpha g_i, alpha tau)) / alpha.
    """
    x, g = _check(x, g)
    if not alpha > 0:
        raise ValueError("alpha must be positive, got {}.".format(alpha))

    target = softthreshold(x - alpha * g, alpha * tau)
    psi = np.where(x != 0, (x - target) / alpha, 0.0)
    return psi


def compute_phi(x, g, tau: float) -> np.ndarray:
    x, g = _check(x, g)
    return np.where(x != 0, g + tau * sgn(x), 0.0)


def compute_v(x, g, tau: float) -> np.ndarray:
    """Minimum-norm subgradient v = omega + phi; v = 0 exactly at a minimizer."""
    return compute_omega(x, g, tau) + compute_phi(x, g, tau)


def subgradient_parts(x, g, tau: float, alpha: float) -> SubgradientParts:
    omega = compute_omega(x, g, tau)
    phi = compute_phi(x, g, tau)
    return SubgradientParts(omega=omega, psi=compute_psi(x, g, tau, alpha), phi=phi, v=omega + phi,
                            alpha_used=float(alpha))


def gradient_balance(omega, psi) -> bool:
    """True iff ||omega||^2 <= ||psi||^2 (ties count as balanced)."""
    omega = np.asarray(omega, dtype=np.float64); psi = np.asarray(psi, dtype=np.float64)
    if omega.shape != psi.shape:
        raise ValueError("Dimension mismatch: omega has shape {} but psi has shape {}.".format(omega.shape, psi.shape))

    return bool(omega @ omega <= psi @ psi)
