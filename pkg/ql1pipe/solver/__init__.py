from .config import (Algorithm, AlphaPolicy, ReferenceObjective, SolverConfig,
                     SubgradientNorm)
from .drivers import (accuracy, estimate_L, reference_objective, solve,
                      solve_fista, solve_iicg1, solve_iicg2, solve_istabb)
from .trace import Record, RunTrace, Status, StepType
