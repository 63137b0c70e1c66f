"""
Seeded problem families. Every generator is a pure function of its
arguments: matrices are filled row-major and vectors front to back, in the
order the draws are listed in each docstring.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..problem.operator import CountingOperator
from ..problem.quadratic import QuadraticProblem
from .rng import Rng

MAX_ENTRIES = 1 << 31


@dataclass
class GeneratedInstance:
    problem: QuadraticProblem
    x_star: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)


def _check_dims(**dims) -> None:
    for name, value in dims.items():
        if int(value) != value or value < 1:
            raise ValueError("{} must be a positive integer, got {}.".format(name, value))

    total = 1
    for value in dims.values():
        total *= int(value)

    if total > MAX_ENTRIES:
        raise ValueError("Requested dimensions {} need {} entries, more than the supported {}.".format(dims, total, MAX_ENTRIES))


def _check_nonnegative(**values) -> None:
    for name, value in values.items():
        if not np.isfinite(value) or value < 0:
            raise ValueError("{} must be a finite nonnegative real, got {}.".format(name, value))


def gen_elastic_net(m: int, n: int, scale: float, gamma: float, tau: float, seed: int) -> GeneratedInstance:
    """
    Elastic-net instance 0.5||y - Bx||^2 + gamma||x||^2 + tau||x||_1 in canonical
    form A = B'B + 2 gamma I, b = B'y.

    Draws: B (m x n standard normal), then y (m normals scaled by scale).
    """
    _check_dims(m=m, n=n)
    _check_nonnegative(gamma=gamma, tau=tau)
    m = int(m); n = int(n)

    rng = Rng(seed)
    B = rng.normals(m * n).reshape(m, n)
    y = scale * rng.normals(m)
    op = CountingOperator.factored(B, gamma)
    P = QuadraticProblem(op, B.T @ y, tau, validate=False)

    meta = {"family": "elastic_net", "seed": int(seed),
            "params": {"m": m, "n": n, "scale": float(scale), "gamma": float(gamma), "tau": float(tau)}}
    return GeneratedInstance(problem=P, meta=meta)


def gen_sigrec(m: int, n: int, signal_nnz: int, noise_sigma: float, gamma: float, tau: float,
               seed: int) -> GeneratedInstance:
    """
    Sparse signal recovery: a signal with signal_nnz random +-1 spikes is encoded
    by a normal matrix scaled by 1/sqrt(m) and perturbed by Gaussian noise.

    Draws: spike positions (partial Fisher-Yates), spike signs (u < 0.5 gives -1),
    B (m x n normals), noise (m normals).
    """
    _check_dims(m=m, n=n)
    _check_nonnegative(noise_sigma=noise_sigma, gamma=gamma, tau=tau)
    m = int(m); n = int(n); signal_nnz = int(signal_nnz)
    if not 0 <= signal_nnz <= n:
        raise ValueError("signal_nnz must lie in [0, n={}], got {}.".format(n, signal_nnz))

    if m > n:
        raise ValueError("sigrec needs m <= n, got m={} and n={}.".format(m, n))

    rng = Rng(seed)
    positions = rng.sample_positions(n, signal_nnz)
    signs = np.where(rng.uniforms(signal_nnz) < 0.5, -1.0, 1.0)
    signal = np.zeros(n); signal[positions] = signs

    B = rng.normals(m * n).reshape(m, n) / np.sqrt(m)
    noise = rng.normals(m)
    y = B @ signal + noise_sigma * noise

    op = CountingOperator.factored(B, gamma)
    P = QuadraticProblem(op, B.T @ y, tau, validate=False)

    meta = {"family": "sigrec", "seed": int(seed),
            "params": {"m": m, "n": n, "signal_nnz": signal_nnz, "noise_sigma": float(noise_sigma),
                       "gamma": float(gamma), "tau": float(tau)},
            "signal": signal}
    return GeneratedInstance(problem=P, meta=meta)


def gen_strict_comp(n: int, nnz: int, cond_target: float, tau: float, margin: float, seed: int,
                    L: float = 1.0) -> GeneratedInstance:
    """
    Dense SPD instance with a known strictly complementary solution.

    A = Q diag(d) Q' with d log-uniform in [L/cond_target, L] (both endpoints
    attained when n >= 2) and Q from the QR factorization of a normal matrix.
    b = A x* + tau u with u = sgn(x*) on the support and u uniform in
    [-(1 - margin), 1 - margin] off it, so x* satisfies the optimality
    conditions exactly and |g_i(x*)| <= (1 - margin) tau off the support.

    Draws: G (n x n normals), spectrum exponents (n uniforms), support
    (partial Fisher-Yates), magnitudes (nnz uniforms), signs (nnz uniforms),
    off-support multipliers (n uniforms).
    """
    _check_dims(rows=n, cols=n)
    n = int(n); nnz = int(nnz)
    if not 0 <= nnz <= n:
        raise ValueError("nnz must lie in [0, n={}], got {}.".format(n, nnz))

    if not (np.isfinite(tau) and tau > 0):
        raise ValueError("tau must be positive, got {}.".format(tau))

    if not 0 < margin < 1:
        raise ValueError("margin must lie in (0, 1), got {}.".format(margin))

    if not (np.isfinite(cond_target) and cond_target >= 1):
        raise ValueError("cond_target must be at least 1, got {}.".format(cond_target))

    if not (np.isfinite(L) and L > 0):
        raise ValueError("L must be positive, got {}.".format(L))

    rng = Rng(seed)
    G = rng.normals(n * n).reshape(n, n)
    Q, R = np.linalg.qr(G)
    signs_R = np.sign(np.diag(R)); signs_R[signs_R == 0] = 1.0
    Q = Q * signs_R

    d = L * cond_target ** (-rng.uniforms(n))
    if n >= 2:
        d[0] = L; d[-1] = L / cond_target

    A = (Q * d) @ Q.T
    A = 0.5 * (A + A.T)

    support = rng.sample_positions(n, nnz)
    magnitudes = 0.5 + rng.uniforms(nnz)
    signs = np.where(rng.uniforms(nnz) < 0.5, -1.0, 1.0)
    x_star = np.zeros(n); x_star[support] = signs * magnitudes

    u = (1.0 - margin) * (2.0 * rng.uniforms(n) - 1.0)
    u[support] = signs

    b = A @ x_star + tau * u
    P = QuadraticProblem(CountingOperator.dense(A), b, tau, validate=False)

    meta = {"family": "strict_comp", "seed": int(seed),
            "params": {"n": n, "nnz": nnz, "cond_target": float(cond_target), "tau": float(tau),
                       "margin": float(margin), "L": float(L)}}
    return GeneratedInstance(problem=P, x_star=x_star, meta=meta)


GENERATORS = {"elastic_net": gen_elastic_net, "sigrec": gen_sigrec, "strict_comp": gen_strict_comp}


def generate(family: str, seed: int, **params) -> GeneratedInstance:
    """Dispatch to a family generator by name."""
    if family not in GENERATORS:
        raise ValueError("Unknown problem family {}. Choose from {}.".format(family, ", ".join(GENERATORS)))

    return GENERATORS[family](seed=seed, **params)
