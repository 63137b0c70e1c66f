from .io import ProblemFormatError, read_problem, write_problem
from .operator import CountingOperator, OperatorKind
from .quadratic import QuadraticProblem, eval_gradient, eval_objective
