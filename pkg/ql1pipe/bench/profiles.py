import logging
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..solver.drivers import accuracy
from ..solver.trace import RunTrace, StepType

logger = logging.getLogger(__name__)

PROFILE_COLUMNS = ["solver", "log2_theta", "rho"]
METRIC_FLOOR = {"mv": 1.0, "seconds": 1e-9}


def profile_from_metrics(metrics, solvers: Sequence[str]) -> pd.DataFrame:
    """
    Dolan-More profile of a problems x solvers metric matrix.

    ### Parameters:
    :param metrics: 2-D array, rows are problems, columns solvers. inf marks a failure.
    :param solvers: Column names.

    ### Returns:
    :return: DataFrame solver,log2_theta,rho with one row per breakpoint ratio of
    each solver (theta = 1 always included).
    """
    metrics = np.asarray(metrics, dtype=np.float64)
    if metrics.ndim != 2 or metrics.shape[1] != len(solvers):
        raise ValueError("Metric matrix of shape {} does not match {} solvers.".format(metrics.shape, len(solvers)))

    solved = np.isfinite(metrics).any(axis=1)
    if not solved.all():
        logger.warning("Excluding {} problem(s) on which every solver failed.".format(int((~solved).sum())))
        metrics = metrics[solved]

    if metrics.shape[0] == 0:
        raise ValueError("No problem was solved by any solver; the profile is empty.")

    best = metrics.min(axis=1, keepdims=True)
    ratios = metrics / best
    n_problems = ratios.shape[0]

    rows = list()
    for j, solver in enumerate(solvers):
        finite = ratios[:, j][np.isfinite(ratios[:, j])]
        for theta in np.union1d([1.0], finite):
            rows.append({"solver": solver, "log2_theta": float(np.log2(theta)),
                         "rho": float(np.count_nonzero(ratios[:, j] <= theta)) / n_problems})

    return pd.DataFrame(rows, columns=PROFILE_COLUMNS)


def dolan_more(table: pd.DataFrame, metric: str = "mv", tol: Optional[float] = None) -> pd.DataFrame:
    """
    Dolan-More performance profile from a bench table.

    Each (problem, tol) pair counts as one problem unless tol selects a single
    tolerance. FAIL and ERROR rows have ratio +inf. Metric values are floored
    at 1 MV or 1e-9 s.

    ### Parameters:
    :param table: Bench table with columns problem,solver,tol,mv,seconds,accuracy,status.
    :param metric: "mv" or "seconds".
    :param tol: Restrict to one tolerance.

    ### Returns:
    :return: DataFrame solver,log2_theta,rho.
    """
    if metric not in METRIC_FLOOR:
        raise ValueError("Unknown profile metric {}. Choose from mv, seconds.".format(metric))

    df = table.copy()
    if tol is not None:
        df = df[np.isclose(df["tol"].astype(float), tol)]

    if df.empty:
        raise ValueError("Bench table has no rows to profile.")

    ok = df["status"] == "Converged"
    values = pd.to_numeric(df[metric], errors="coerce").astype(float)
    df["value"] = np.where(ok, np.maximum(values, METRIC_FLOOR[metric]), np.inf)
    df["value"] = df["value"].fillna(np.inf)

    solvers = list(dict.fromkeys(df["solver"]))
    pivot = df.pivot_table(index=["problem", "tol"], columns="solver", values="value", aggfunc="min")
    pivot = pivot.reindex(columns=solvers).fillna(np.inf)
    return profile_from_metrics(pivot.to_numpy(), solvers)


def pareto_points(points: Iterable[Tuple[float, int]]) -> List[Tuple[float, int]]:
    """Non-dominated (accuracy, nnz) pairs sorted by increasing accuracy."""
    frontier = list()
    best_nnz = None
    for acc, nnz in sorted((float(a), int(z)) for a, z in points):
        if best_nnz is None or nnz < best_nnz:
            frontier.append((acc, nnz))
            best_nnz = nnz

    return frontier


def pareto_frontier(trace: Union[RunTrace, pd.DataFrame], F_star: float) -> List[Tuple[float, int]]:
    """
    Accuracy/sparsity Pareto frontier of a trace.

    ### Returns:
    :return: [(accuracy, nnz)] with strictly increasing accuracy and strictly decreasing nnz.
    """
    if isinstance(trace, pd.DataFrame):
        trace = RunTrace.from_frame(trace)

    if trace.records == []:
        raise ValueError("Cannot build a Pareto frontier from an empty trace.")

    return pareto_points((accuracy(rec.F, F_star), rec.nnz) for rec in trace.records)


def cg_phase_histogram(trace: Union[RunTrace, pd.DataFrame, Sequence[StepType]]) -> List[Tuple[int, int]]:
    """
    Lengths of the subspace phases: maximal runs of CG/CUTBACK records between
    first-order records. INIT records are ignored.

    ### Returns:
    :return: [(phase_index, cg_steps)] with phases numbered from 1.
    """
    if isinstance(trace, pd.DataFrame):
        trace = RunTrace.from_frame(trace)

    steps = trace.steps() if isinstance(trace, RunTrace) else [StepType(s) for s in trace]

    phases = list()
    run = 0
    for step in steps:
        if step.subspace:
            run += 1

        elif step.first_order and run > 0:
            phases.append((len(phases) + 1, run)); run = 0

    if run > 0:
        phases.append((len(phases) + 1, run))

    return phases
