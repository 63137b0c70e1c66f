import dataclasses
import logging
import time
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from ..probgen.rng import Rng
from ..problem.operator import CountingOperator
from ..problem.quadratic import QuadraticProblem, eval_objective
from .config import (Algorithm, AlphaPolicy, ReferenceObjective, SolverConfig,
                     SubgradientNorm)
from .first_order import (LineSearchMemory, StepMode, ista_bb_ls, ista_step,
                          subspace_ista_step)
from .subgrad import (compute_omega, compute_phi, compute_psi, compute_v,
                      gradient_balance, sgn)
from .subspace_cg import (CurvatureBreak, cg_step, cutback, cutback_length,
                          init_cg_cycle, residual_gap, sufficient_decrease)
from .trace import Record, RunTrace, Status, StepType

logger = logging.getLogger(__name__)


def accuracy(F_k: float, F_star: float) -> float:
    """Relative objective gap (F_k - F_star) / max(|F_star|, 1e-12)."""
    return (F_k - F_star) / max(abs(F_star), 1e-12)


def estimate_L(op: CountingOperator, seed: int = 0, max_iter: int = 200, rtol: float = 1e-4,
               safety: float = 1.01) -> float:
    """
    Estimate the largest eigenvalue of A by power iteration.

    ### Parameters:
    :param op: Counting operator; every iteration is charged one MV.
    :param seed: Seed of the random unit start vector.
    :param max_iter: Iteration cap.
    :param rtol: Stop when the Rayleigh quotient changes by at most rtol relative.
    :param safety: Multiplier applied to the final Rayleigh quotient.

    ### Returns:
    :return: safety * lambda_est, or 1.0 for the zero operator.
    """
    v = Rng(seed).normals(op.n)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        v = np.ones(op.n); norm = np.linalg.norm(v)

    v = v / norm
    lam_prev = None
    lam = 0.0
    for _ in range(max_iter):
        w = op.apply(v)
        lam = float(v @ w)
        w_norm = float(np.linalg.norm(w))
        if w_norm == 0.0:
            return 1.0

        if lam_prev is not None and abs(lam - lam_prev) <= rtol * abs(lam):
            break

        lam_prev = lam
        v = w / w_norm

    if not lam > 0.0:
        return 1.0

    return safety * lam


class Solver(ABC):
    def __init__(self, P: QuadraticProblem, cfg: SolverConfig, x0: Optional[np.ndarray] = None,
                 oracle=None) -> None:
        """
        Shared machinery of the solver loops: private MV counter, cached A x and
        gradient, trace recording, termination, stall detection and the optional
        theory audit.

        ### Parameters:
        :param P: Problem to solve. Its counter is charged with the work of the solve.
        :param cfg: Solver configuration.
        :param x0: Starting point (default zero vector, which costs no MV).
        :param oracle: TheoryOracle used when cfg.theory_checks is set. Built from
        the dense matrix when omitted.

        ### Methods:
        - public
          - solve: Run until termination and return the RunTrace.
        - private
          - iterate: One outer iteration of the concrete method.
        """
        self.parent = P
        self.cfg = cfg
        self.op = P.op.fork()
        self.P = QuadraticProblem(self.op, P.b, P.tau, validate=False)
        self.tau = P.tau
        self.x0 = None if x0 is None else np.array(x0, dtype=np.float64)
        if self.x0 is not None and self.x0.shape != (P.n,):
            raise ValueError("Dimension mismatch: problem has n={} but x0 has shape {}.".format(P.n, self.x0.shape))

        self.audit = None
        if cfg.theory_checks:
            from .theory import Auditor, build_oracle
            if oracle is None:
                oracle = build_oracle(P)

            self.audit = Auditor(oracle, cfg.c)

    # bookkeeping

    def set_point(self, x: np.ndarray, Ax: np.ndarray, F: Optional[float] = None) -> None:
        if np.any(x != self.x):
            self.x_prev = self.x; self.g_prev = self.g

        self.x = x
        self.Ax = Ax
        self.g = Ax - self.P.b
        self.F = eval_objective(self.P, x, Ax) if F is None else F

    def converged(self) -> bool:
        term = self.cfg.termination
        if isinstance(term, ReferenceObjective):
            return accuracy(self.F, term.F_star) <= self.cfg.tol

        v = compute_v(self.x, self.g, self.tau)
        return float(np.max(np.abs(v), initial=0.0)) <= self.v_scale

    def record(self, step: StepType) -> None:
        if step is not StepType.INIT:
            self.k += 1

        mv = self.op.mv_count
        self.trace.records.append(Record(mv=mv, k=self.k, F=self.F, nnz=int(np.count_nonzero(self.x)),
                                         step=step, seconds=time.perf_counter() - self.t0))
        logger.debug("k={} mv={} F={:.16e} step={}".format(self.k, mv, self.F, step.value))

        if self.F < self.best_F:
            self.best_F = self.F; self.best_x = self.x.copy()

        if self.converged() and mv <= self.cfg.mv_budget:
            self.status = Status.CONVERGED

        elif mv >= self.cfg.mv_budget:
            self.status = Status.BUDGET_EXHAUSTED

        elif abs(self.F - self.stall_F) > 1e-16 * abs(self.stall_F):
            self.stall_F = self.F; self.stall_mv = mv

        elif mv - self.stall_mv >= self.cfg.stall_window:
            self.status = Status.STALLED

    def out_of_budget(self) -> bool:
        if self.status is None and self.op.mv_count >= self.cfg.mv_budget:
            self.status = Status.BUDGET_EXHAUSTED

        return self.status is not None

    # first-order steps shared by the iiCG and ISTA-BB loops

    def first_order_step(self, mode: StepMode, balance: Optional[bool] = None) -> None:
        x_old = self.x; g_old = self.g; F_old = self.F
        if self.cfg.alpha_policy is AlphaPolicy.BB_LINE_SEARCH:
            res = ista_bb_ls(self.x, self.x_prev, self.g, self.g_prev, mode, self.mem, self.P, self.L_est,
                             self.cfg.ls_alpha_min, self.cfg.ls_alpha_max)
            self.mem = res.mem
            alpha = res.alpha
            self.set_point(res.x_next, res.Ax, res.F)
            if res.fallback:
                step = StepType.LSFALLBACK

            else:
                step = StepType.ISTA if mode is StepMode.FULL else StepType.SUBISTA

        else:
            alpha = 1.0 / self.L_est
            if mode is StepMode.FULL:
                x_new = ista_step(self.x, self.g, self.tau, alpha); step = StepType.ISTA

            else:
                x_new = subspace_ista_step(self.x, self.g, self.tau, alpha); step = StepType.SUBISTA

            self.set_point(x_new, self.op.apply(x_new))

        if self.audit is not None:
            self.audit.first_order(self.k + 1, step, x_old, g_old, F_old, self.F, alpha, self.tau, balance)

        self.record(step)

    def setup(self) -> None:
        self.t0 = time.perf_counter()
        self.trace = RunTrace(algorithm=self.cfg.algorithm.value)
        self.status = None
        self.k = 0

        if self.cfg.lipschitz is not None:
            self.L_est = float(self.cfg.lipschitz)

        else:
            self.L_est = estimate_L(self.op, self.cfg.L_seed, self.cfg.power_iterations, self.cfg.power_rtol,
                                    self.cfg.power_safety)

        self.trace.L_est = self.L_est
        self.trace.mv_L = self.op.mv_count
        self.alpha_bal = self.cfg.alpha_bal if self.cfg.alpha_bal is not None else 1.0 / (self.cfg.alpha_bal_factor * self.L_est)
        self.eps_curv = 1e-14 * self.op.norm_bound()
        self.b_norm = float(np.linalg.norm(self.P.b))

        self.x = np.zeros(self.P.n) if self.x0 is None else self.x0
        self.Ax = np.zeros(self.P.n) if self.x0 is None else self.op.apply(self.x0)
        self.g = self.Ax - self.P.b
        self.F = eval_objective(self.P, self.x, self.Ax)
        self.x_prev = None; self.g_prev = None

        v0 = compute_v(self.x, self.g, self.tau)
        self.v_scale = self.cfg.tol * max(1.0, float(np.max(np.abs(v0), initial=0.0)))
        self.mem = LineSearchMemory.seeded(self.F, self.cfg.ls_memory, self.cfg.xi, self.cfg.max_halvings)
        self.best_F = np.inf; self.best_x = self.x.copy()
        self.stall_F = self.F; self.stall_mv = self.op.mv_count

        self.record(StepType.INIT)

    def solve(self) -> RunTrace:
        logger.info("Starting {} on n={} tau={} (budget {} MV).".format(self.cfg.algorithm.value, self.P.n, self.tau,
                                                                        self.cfg.mv_budget))
        self.setup()
        while self.status is None:
            if self.out_of_budget():
                break

            self.iterate()

        if self.status is Status.CONVERGED:
            self.trace.final_x = self.x.copy(); self.trace.F_final = self.F

        else:
            self.trace.final_x = self.best_x; self.trace.F_final = self.best_F

        self.trace.status = self.status
        if self.audit is not None:
            self.audit.finish(self.trace)
            self.trace.violations = list(self.audit.violations)

        self.parent.op.absorb(self.op)
        logger.info("{} finished with status {} after {} MV, F={:.16e}.".format(
            self.cfg.algorithm.value, self.status.value, self.op.mv_count, self.trace.F_final))
        return self.trace

    @abstractmethod
    def iterate(self) -> None:
        pass


class IICG1Solver(Solver):
    """Interleaved ISTA and projected CG; every first-order step is a full ISTA step."""

    def first_order_mode(self):
        return StepMode.FULL, None

    def iterate(self) -> None:
        mode, balance = self.first_order_mode()
        self.first_order_step(mode, balance)
        if self.status is None:
            self.cg_phase()

    def cg_phase(self) -> None:
        s = init_cg_cycle(self.x, self.g, self.tau)
        b = self.P.b
        shift = self.tau * sgn(s.x_cg)
        stop_rho = 1e-14 * (1.0 + self.b_norm)

        while self.status is None:
            omega = compute_omega(self.x, self.g, self.tau)
            psi = compute_psi(self.x, self.g, self.tau, self.alpha_bal)
            if not gradient_balance(omega, psi):
                break

            if np.linalg.norm(s.rho) <= stop_rho:
                break

            if self.out_of_budget():
                break

            v = omega + compute_phi(self.x, self.g, self.tau)
            x_k = self.x; Ax_k = self.Ax; F_k = self.F
            in_orthant = bool(np.all(sgn(x_k) == sgn(s.x_cg)))

            try:
                s_new, crossed = cg_step(s, self.op, self.eps_curv)

            except CurvatureBreak as err:
                logger.warning("Curvature break in CG phase: {}.".format(err))
                self.out_of_budget()
                break

            Ax_new = s_new.r + b - shift
            F_new = eval_objective(self.P, s_new.x, Ax_new)

            if crossed and not sufficient_decrease(F_new, F_k, v, self.cfg.c):
                alpha_b = cutback_length(x_k, s.x_cg, s.d)
                x_cut = cutback(x_k, s.x_cg, s.d)
                if np.isinf(alpha_b):
                    alpha_b = 1.0
                self.set_point(x_cut, Ax_k + alpha_b * s_new.last_Ad)
                self.record(StepType.CUTBACK)
                break

            s = s_new
            self.set_point(s.x, Ax_new, F_new)
            if self.cfg.debug_residual:
                gap = residual_gap(s, self.op, b, self.tau)
                if gap > 1e-8 * self.op.norm_bound() * max(np.linalg.norm(s.x), 1.0):
                    logger.warning("CG residual recurrence drifted by {:.3e}.".format(gap))

            if self.audit is not None:
                self.audit.cg_step(self.k + 1, F_k, F_new, v, in_orthant)

            self.record(StepType.CG)


class IICG2Solver(IICG1Solver):
    """iiCG with a subspace ISTA step whenever the gradient balance condition holds."""

    def first_order_mode(self):
        omega = compute_omega(self.x, self.g, self.tau)
        psi = compute_psi(self.x, self.g, self.tau, self.alpha_bal)
        balance = gradient_balance(omega, psi)
        return (StepMode.SUBSPACE if balance else StepMode.FULL), balance


class IstaBBSolver(Solver):
    """Repeated full ISTA-BB-LS steps."""

    def iterate(self) -> None:
        self.first_order_step(StepMode.FULL)


class FistaSolver(Solver):
    """Accelerated proximal gradient with constant steplength 1/L_est, one MV per iteration."""

    def setup(self) -> None:
        super().setup()
        self.t = 1.0
        self.y = self.x.copy(); self.Ay = self.Ax.copy()

    def iterate(self) -> None:
        alpha = 1.0 / self.L_est
        x_old = self.x; Ax_old = self.Ax
        x_new = ista_step(self.y, self.Ay - self.P.b, self.tau, alpha)
        self.set_point(x_new, self.op.apply(x_new))
        self.record(StepType.ISTA)

        t_next = (1.0 + np.sqrt(1.0 + 4.0 * self.t * self.t)) / 2.0
        beta = (self.t - 1.0) / t_next
        self.y = x_new + beta * (x_new - x_old)
        self.Ay = (1.0 + beta) * self.Ax - beta * Ax_old
        self.t = t_next


SOLVERS = {Algorithm.IICG1: IICG1Solver, Algorithm.IICG2: IICG2Solver,
           Algorithm.FISTA: FistaSolver, Algorithm.ISTABB: IstaBBSolver}


def solve(P: QuadraticProblem, cfg: SolverConfig, x0: Optional[np.ndarray] = None, oracle=None) -> RunTrace:
    """Run the solver named by cfg.algorithm."""
    return SOLVERS[cfg.algorithm](P, cfg, x0, oracle).solve()


def solve_iicg1(P: QuadraticProblem, cfg: SolverConfig, x0: Optional[np.ndarray] = None, oracle=None) -> RunTrace:
    return IICG1Solver(P, cfg, x0, oracle).solve()


def solve_iicg2(P: QuadraticProblem, cfg: SolverConfig, x0: Optional[np.ndarray] = None, oracle=None) -> RunTrace:
    return IICG2Solver(P, cfg, x0, oracle).solve()


def solve_fista(P: QuadraticProblem, cfg: SolverConfig, x0: Optional[np.ndarray] = None, oracle=None) -> RunTrace:
    return FistaSolver(P, cfg, x0, oracle).solve()


def solve_istabb(P: QuadraticProblem, cfg: SolverConfig, x0: Optional[np.ndarray] = None, oracle=None) -> RunTrace:
    return IstaBBSolver(P, cfg, x0, oracle).solve()


def reference_objective(P: QuadraticProblem, cfg: Optional[SolverConfig] = None, tol: float = 1e-13,
                        budget_factor: int = 4) -> float:
    """
    Best known objective value: minimum F along a high-accuracy iiCG-2 run with
    subgradient-norm termination and an enlarged budget. The work is not
    charged to P.

    ### Parameters:
    :param P: Problem instance.
    :param cfg: Base configuration (budget and line-search settings are taken from it).
    :param tol: Subgradient-norm tolerance of the reference run.
    :param budget_factor: Multiplier on cfg.mv_budget.

    ### Returns:
    :return: F_star.
    """
    base = cfg if cfg is not None else SolverConfig()
    ref_cfg = dataclasses.replace(base, algorithm=Algorithm.IICG2, alpha_policy=AlphaPolicy.BB_LINE_SEARCH,
                                  tol=tol, termination=SubgradientNorm(), mv_budget=budget_factor * base.mv_budget,
                                  theory_checks=False, alpha_bal=None, alpha_bal_factor=1.0)
    shadow = QuadraticProblem(P.op.fork(), P.b, P.tau, validate=False)
    trace = solve_iicg2(shadow, ref_cfg)
    if trace.status is not Status.CONVERGED:
        logger.warning("Reference run ended with status {}; using the best objective found.".format(trace.status.value))

    return float(min(trace.F_values.min(), trace.F_final))
