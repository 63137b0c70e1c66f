from .profiles import (cg_phase_histogram, dolan_more, pareto_frontier,
                       pareto_points, profile_from_metrics)
from .suite import (BenchResult, alpha_sweep, bench_problem, run_suite,
                    summarize_sweep, sweep_detail, sweep_problem)
