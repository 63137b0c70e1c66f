import dataclasses
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ..problem.io import read_problem
from ..solver.config import (Algorithm, AlphaPolicy, ReferenceObjective,
                             SolverConfig)
from ..solver.drivers import accuracy, reference_objective, solve
from ..solver.trace import Status

logger = logging.getLogger(__name__)

BENCH_COLUMNS = ["problem", "solver", "tol", "mv", "seconds", "accuracy", "status"]
SWEEP_COLUMNS = ["factor", "mean_inflation"]
CONVERGED = "Converged"
FAIL = "FAIL"
ERROR = "ERROR"


@dataclass
class BenchResult:
    problem: str
    solver: str
    tol: float
    mv: Optional[int]
    seconds: float
    accuracy: float
    status: str


def bench_problem(name: str, path: str, solvers: Sequence[str], tols: Sequence[float], cfg: SolverConfig,
                  ref_tol: float = 1e-13, ref_budget_factor: int = 4) -> List[dict]:
    """
    Benchmark every solver on one problem file.

    The reference objective is computed once; each solver then runs with
    reference-objective termination at the smallest tolerance and the MV count
    to every tolerance is read off its trace.

    ### Parameters:
    :param name: Problem id used in the result rows.
    :param path: System file path of the QL1P problem.
    :param solvers: Solver names.
    :param tols: Accuracy targets.
    :param cfg: Base solver configuration (budget, line-search settings).

    ### Returns:
    :return: One row dict per (solver, tol) in BENCH_COLUMNS layout.
    """
    tols = sorted(float(t) for t in tols)

    def error_rows(solver_names):
        return [dataclasses.asdict(BenchResult(name, s, t, None, float("nan"), float("nan"), ERROR))
                for s in solver_names for t in tols]

    try:
        P = read_problem(path)
        F_star = reference_objective(P, cfg, ref_tol, ref_budget_factor)

    except (OSError, ValueError, ArithmeticError) as err:
        logger.warning("Problem {} failed before benchmarking: {}".format(name, err))
        return error_rows(solvers)

    rows = list()
    for solver in solvers:
        try:
            run_cfg = dataclasses.replace(cfg, algorithm=Algorithm.parse(solver), alpha_policy=None, tol=tols[0],
                                          termination=ReferenceObjective(F_star), theory_checks=False)
            trace = solve(P, run_cfg)

        except (ValueError, ArithmeticError) as err:
            logger.warning("Solver {} failed on problem {}: {}".format(solver, name, err))
            rows.extend(error_rows([solver]))
            continue

        for tol in tols:
            hit = None
            for rec in trace.records:
                if accuracy(rec.F, F_star) <= tol:
                    hit = rec
                    break

            if hit is not None and hit.mv <= cfg.mv_budget:
                result = BenchResult(name, solver, tol, hit.mv, hit.seconds, accuracy(hit.F, F_star), CONVERGED)

            else:
                result = BenchResult(name, solver, tol, None, trace.records[-1].seconds,
                                     accuracy(trace.F_final, F_star), FAIL)

            rows.append(dataclasses.asdict(result))

    return rows


def run_suite(manifest: pd.DataFrame, solvers: Sequence[str], tols: Sequence[float], mv_budget: int,
              cfg: Optional[SolverConfig] = None, ref_tol: float = 1e-13, ref_budget_factor: int = 4,
              n_jobs: int = 1) -> pd.DataFrame:
    """
    Run every solver on every manifest problem.

    ### Parameters:
    :param manifest: DataFrame with at least the columns problem and path.
    :param solvers: Solver names (iicg1, iicg2, fista, istabb).
    :param tols: Accuracy targets.
    :param mv_budget: MV budget per solve.
    :param cfg: Base configuration; its budget is replaced by mv_budget.
    :param n_jobs: joblib worker count; problems are the unit of parallelism.

    ### Returns:
    :return: Bench table with columns problem,solver,tol,mv,seconds,accuracy,status.
    """
    for solver in solvers:
        Algorithm.parse(solver)

    base = dataclasses.replace(cfg if cfg is not None else SolverConfig(), mv_budget=int(mv_budget))
    jobs = (delayed(bench_problem)(row.problem, row.path, list(solvers), list(tols), base, ref_tol, ref_budget_factor)
            for row in manifest.itertuples(index=False))
    results = Parallel(n_jobs=n_jobs)(jobs)

    rows = [row for problem_rows in results for row in problem_rows]
    return bench_frame(rows)


def bench_frame(rows: List[dict]) -> pd.DataFrame:
    df = pd.DataFrame(rows, columns=BENCH_COLUMNS)
    df["mv"] = df["mv"].astype("Int64")
    return df


def sweep_problem(name: str, path: str, factors: Sequence[float], cfg: SolverConfig, tol: float = 1e-4,
                  ref_tol: float = 1e-13, ref_budget_factor: int = 4) -> List[dict]:
    """
    Run iiCG-2 with alpha_bal = 1/(factor L_est) for every factor on one problem.

    ### Returns:
    :return: Rows {problem, factor, mv, status}.
    """
    try:
        P = read_problem(path)
        F_star = reference_objective(P, cfg, ref_tol, ref_budget_factor)

    except (OSError, ValueError, ArithmeticError) as err:
        logger.warning("Problem {} failed before the sweep: {}".format(name, err))
        return [{"problem": name, "factor": float(f), "mv": None, "status": ERROR} for f in factors]

    rows = list()
    for factor in factors:
        run_cfg = dataclasses.replace(cfg, algorithm=Algorithm.IICG2, alpha_policy=AlphaPolicy.BB_LINE_SEARCH,
                                      alpha_bal=None, alpha_bal_factor=float(factor), tol=tol,
                                      termination=ReferenceObjective(F_star), theory_checks=False)
        try:
            trace = solve(P, run_cfg)

        except (ValueError, ArithmeticError) as err:
            logger.warning("iiCG-2 with factor {} failed on problem {}: {}".format(factor, name, err))
            rows.append({"problem": name, "factor": float(factor), "mv": None, "status": ERROR})
            continue

        converged = trace.status is Status.CONVERGED
        rows.append({"problem": name, "factor": float(factor), "mv": trace.mv_total if converged else None,
                     "status": CONVERGED if converged else FAIL})

    return rows


def summarize_sweep(detail: pd.DataFrame, factors: Sequence[float]) -> pd.DataFrame:
    """
    Mean MV inflation relative to factor 1 over the problems on which both the
    factor and the baseline converged. Factors with no such problem report inf.
    """
    ok = detail[detail["status"] == CONVERGED]
    baseline = ok[np.isclose(ok["factor"], 1.0)].set_index("problem")["mv"].astype(float)

    rows = list()
    for factor in factors:
        runs = ok[np.isclose(ok["factor"], float(factor))].set_index("problem")["mv"].astype(float)
        common = runs.index.intersection(baseline.index)
        if len(common) == 0:
            logger.warning("No problem converged for both factor {} and factor 1.".format(factor))
            rows.append({"factor": float(factor), "mean_inflation": float("inf")})
            continue

        inflation = runs.loc[common] / np.maximum(baseline.loc[common], 1.0)
        rows.append({"factor": float(factor), "mean_inflation": float(inflation.mean())})

    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def sweep_factors(factors: Sequence[float]) -> List[float]:
    """Validated factor list with the baseline factor 1 included."""
    factors = [float(f) for f in factors]
    if any(not f >= 1.0 for f in factors):
        raise ValueError("alpha_bal factors must be at least 1, got {}.".format(factors))

    if not any(np.isclose(f, 1.0) for f in factors):
        factors = [1.0] + factors

    return factors


def sweep_detail(manifest: pd.DataFrame, factors: Sequence[float], cfg: Optional[SolverConfig] = None,
                 tol: float = 1e-4, ref_tol: float = 1e-13, ref_budget_factor: int = 4,
                 n_jobs: int = 1) -> pd.DataFrame:
    base = cfg if cfg is not None else SolverConfig()
    factors = sweep_factors(factors)
    jobs = (delayed(sweep_problem)(row.problem, row.path, factors, base, tol, ref_tol, ref_budget_factor)
            for row in manifest.itertuples(index=False))
    results = Parallel(n_jobs=n_jobs)(jobs)
    return pd.DataFrame([row for rows in results for row in rows], columns=["problem", "factor", "mv", "status"])


def alpha_sweep(manifest: pd.DataFrame, factors: Sequence[float], cfg: Optional[SolverConfig] = None,
                tol: float = 1e-4, ref_tol: float = 1e-13, ref_budget_factor: int = 4,
                n_jobs: int = 1) -> pd.DataFrame:
    """
    Sensitivity of iiCG-2 to the gradient-balance steplength.

    ### Parameters:
    :param manifest: Problems to run.
    :param factors: Factors >= 1; alpha_bal = 1/(factor L_est). Factor 1 is added when missing.
    :param tol: Accuracy target of every run.

    ### Returns:
    :return: DataFrame factor,mean_inflation.
    """
    detail = sweep_detail(manifest, factors, cfg, tol, ref_tol, ref_budget_factor, n_jobs)
    return summarize_sweep(detail, sweep_factors(factors))
