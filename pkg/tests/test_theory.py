import numpy as np
import pytest

from ql1pipe.probgen import gen_strict_comp
from ql1pipe.problem import eval_objective
from ql1pipe.solver import SolverConfig, solve
from ql1pipe.solver.first_order import ista_step, subspace_ista_step
from ql1pipe.solver.subgrad import (compute_omega, compute_phi, compute_psi,
                                    compute_v, gradient_balance)
from ql1pipe.solver.subspace_cg import cg_step, init_cg_cycle
from ql1pipe.solver.theory import (SLACK, Auditor, TheoryOracle, build_oracle,
                                   check_two_step_rate, corollary_mv_bound,
                                   step_beta)
from ql1pipe.solver.trace import Record, RunTrace, Status, StepType


@pytest.fixture(scope="module")
def instance():
    inst = gen_strict_comp(n=25, nnz=8, cond_target=20.0, tau=0.2, margin=0.4, seed=17)
    return inst, build_oracle(inst.problem)


def F(P, x):
    return eval_objective(P, x, P.op.matrix() @ x)


def test_oracle_matches_construction(instance):
    inst, oracle = instance
    assert oracle.L == pytest.approx(1.0, rel=1e-10)
    assert oracle.lam_min == pytest.approx(1.0 / 20.0, rel=1e-8)
    assert oracle.F_star == pytest.approx(F(inst.problem, inst.x_star), rel=1e-10, abs=1e-12)


def test_ista_step_contracts_the_gap(instance):
    inst, oracle = instance
    P = inst.problem
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = 2.0 * rng.standard_normal(P.n); x[rng.random(P.n) < 0.5] = 0.0
        alpha = rng.uniform(0.1, 1.0) / oracle.L
        x_next = ista_step(x, P.op.matrix() @ x - P.b, P.tau, alpha)
        gap, gap_next = F(P, x) - oracle.F_star, F(P, x_next) - oracle.F_star
        assert gap_next <= (1.0 - oracle.lam_min * alpha) * gap + SLACK


def test_balanced_subspace_step_contracts_the_gap(instance):
    inst, oracle = instance
    P = inst.problem
    rng = np.random.default_rng(2)
    checked = 0
    for _ in range(40):
        x = inst.x_star + 0.3 * rng.standard_normal(P.n) * (inst.x_star != 0)
        g = P.op.matrix() @ x - P.b
        alpha = 1.0 / oracle.L
        if not gradient_balance(compute_omega(x, g, P.tau), compute_psi(x, g, P.tau, alpha)):
            continue

        x_next = subspace_ista_step(x, g, P.tau, alpha)
        gap, gap_next = F(P, x) - oracle.F_star, F(P, x_next) - oracle.F_star
        assert gap_next <= (1.0 - 0.5 * oracle.lam_min * alpha) * gap + SLACK
        checked += 1

    assert checked > 0


def test_first_cg_step_decreases_by_beta_v(instance):
    inst, oracle = instance
    P = inst.problem
    beta = step_beta(1e-4, oracle.L)
    rng = np.random.default_rng(3)
    for _ in range(10):
        x = inst.x_star * (1.0 + 0.01 * rng.standard_normal(P.n))
        g = P.op.matrix() @ x - P.b
        s, crossed = cg_step(init_cg_cycle(x, g, P.tau), P.op)
        assert not crossed
        v = compute_v(x, g, P.tau)
        assert F(P, s.x) <= F(P, x) - beta * float(v @ v) + SLACK


def test_psi_bounded_by_phi_along_steps(instance):
    inst, _ = instance
    P = inst.problem
    rng = np.random.default_rng(4)
    x = rng.standard_normal(P.n)
    g = P.op.matrix() @ x - P.b
    for alpha in (0.01, 0.5, 1.0):
        assert np.linalg.norm(compute_psi(x, g, P.tau, alpha)) <= np.linalg.norm(compute_phi(x, g, P.tau)) + 1e-12


class TestTwoStepRate:

    def test_geometric_sequence_passes(self):
        oracle = TheoryOracle(lam_min=1.0, L=1.0, F_star=0.0)
        beta = 0.1
        values = 0.9 ** np.arange(10)
        assert check_two_step_rate(values, oracle, beta) == []

    def test_stagnation_is_flagged(self):
        oracle = TheoryOracle(lam_min=1.0, L=1.0, F_star=0.0)
        violations = check_two_step_rate([1.0, 1.0, 1.0, 1.0], oracle, 0.1)
        assert len(violations) == 2
        assert "k=0" in violations[0]


def make_trace(F_values, mvs):
    records = [Record(mv=mv, k=k, F=F, nnz=1, step=StepType.ISTA) for k, (F, mv) in enumerate(zip(F_values, mvs))]
    return RunTrace(records=records, status=Status.CONVERGED, algorithm="iicg2", F_final=F_values[-1])


class TestCorollaryBound:

    def test_already_accurate(self):
        oracle = TheoryOracle(lam_min=1.0, L=1.0, F_star=0.0)
        assert corollary_mv_bound(make_trace([1e-9], [0]), oracle, 0.1) is None

    def test_measured_and_bound(self):
        oracle = TheoryOracle(lam_min=1.0, L=1.0, F_star=0.0)
        measured, bound = corollary_mv_bound(make_trace([1.0, 1e-3, 1e-7], [0, 2, 5]), oracle, 0.1)
        assert measured == 5
        assert bound == pytest.approx(np.log(1e-6) / np.log(np.sqrt(0.95)))


class TestAuditor:

    def test_non_decreasing_ista_step_is_flagged(self):
        audit = Auditor(TheoryOracle(lam_min=0.5, L=1.0, F_star=0.0), c=1e-4)
        audit.first_order(1, StepType.ISTA, np.array([1.0]), np.array([1.0]), 1.0, 1.0, 1.0, 0.1, None)
        assert len(audit.violations) == 1
        assert "ISTA" in audit.violations[0]

    def test_cg_step_is_checked_only_from_the_orthant(self):
        audit = Auditor(TheoryOracle(lam_min=0.5, L=1.0, F_star=0.0), c=1e-4)
        audit.cg_step(2, 1.0, 1.0, np.array([1.0]), in_orthant=False)
        assert audit.violations == []
        audit.cg_step(2, 1.0, 1.0, np.array([1.0]), in_orthant=True)
        assert len(audit.violations) == 1

    def test_singular_operator_disables_rates(self):
        audit = Auditor(TheoryOracle(lam_min=0.0, L=1.0, F_star=0.0), c=1e-4)
        audit.first_order(1, StepType.ISTA, np.array([1.0]), np.array([1.0]), 1.0, 2.0, 1.0, 0.1, None)
        audit.cg_step(2, 1.0, 2.0, np.array([1.0]), in_orthant=True)
        audit.finish(make_trace([1.0, 1.0, 1.0], [0, 1, 2]))
        assert audit.violations == []

    def test_large_steplengths_skip_the_two_step_rate(self):
        audit = Auditor(TheoryOracle(lam_min=0.5, L=1.0, F_star=0.0), c=1e-4)
        audit.alphas = [2.0]
        audit.finish(make_trace([1.0, 1.0, 1.0], [0, 1, 2]))
        assert audit.violations == []

    def test_beta(self):
        assert step_beta(1e-4, 1.0) == 1e-4
        assert step_beta(1.0, 2.0) == 1.0 / 16.0


@pytest.mark.slow
@pytest.mark.parametrize("algorithm", ["iicg1", "iicg2"])
def test_constant_steplength_runs_meet_every_bound(algorithm):
    for seed in range(15):
        inst = gen_strict_comp(n=25, nnz=8, cond_target=20.0, tau=0.2, margin=0.4, seed=100 + seed)
        P = inst.problem
        oracle = build_oracle(P, F_star=F(P, inst.x_star))
        cfg = SolverConfig(algorithm=algorithm, alpha_policy="constant", lipschitz=oracle.L,
                           c=1.0 / (8.0 * oracle.L), theory_checks=True, tol=1e-10, mv_budget=20000)
        trace = solve(P, cfg, oracle=oracle)
        assert trace.status is Status.CONVERGED, seed
        assert trace.violations == [], (seed, trace.violations)
