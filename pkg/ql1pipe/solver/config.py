from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Optional, Union


class Algorithm(Enum):
    IICG1 = "iicg1"
    IICG2 = "iicg2"
    FISTA = "fista"
    ISTABB = "istabb"

    @classmethod
    def parse(cls, name: Union[str, "Algorithm"]) -> "Algorithm":
        if isinstance(name, cls):
            return name

        try:
            return cls(str(name).lower().replace("-", "").replace("_", ""))

        except ValueError:
            raise ValueError("Unknown solver {}. Choose from {}.".format(name, ", ".join(a.value for a in cls)))


class AlphaPolicy(Enum):
    CONSTANT_INV_L = "constant"
    BB_LINE_SEARCH = "bb"


@dataclass(frozen=True)
class SubgradientNorm:
    """Stop when ||v(x)||_inf <= tol max(1, ||v(x0)||_inf)."""


@dataclass(frozen=True)
class ReferenceObjective:
    """Stop when (F(x) - F_star) / max(|F_star|, 1e-12) <= tol."""
    F_star: float


Termination = Union[SubgradientNorm, ReferenceObjective]


@dataclass
class SolverConfig:
    """
    Solver options.

    ### Parameters:
    :param algorithm: Which driver to run.
    :param c: Sufficient-decrease constant of the CG phase.
    :param alpha_policy: First-order steplength rule. Defaults to BB line search for
    iiCG and ISTA-BB, 1/L for FISTA.
    :param alpha_bal: Steplength used for psi in the gradient balance test. Defaults
    to 1/(alpha_bal_factor L_est).
    :param tol: Termination tolerance.
    :param termination: SubgradientNorm() or ReferenceObjective(F_star).
    :param mv_budget: Maximum number of MV units, power iterations included.
    :param lipschitz: Known largest eigenvalue of A; skips estimation when given.
    :param theory_checks: Audit every step against the per-step decrease bounds (needs an oracle).
    """
    algorithm: Algorithm = Algorithm.IICG2
    c: float = 1e-4
    alpha_policy: Optional[AlphaPolicy] = None
    alpha_bal: Optional[float] = None
    alpha_bal_factor: float = 1.0
    tol: float = 1e-6
    termination: Termination = field(default_factory=SubgradientNorm)
    mv_budget: int = 50000
    ls_memory: int = 5
    xi: float = 0.005
    max_halvings: int = 60
    ls_alpha_min: float = 1e-30
    ls_alpha_max: float = 1e30
    theory_checks: bool = False
    lipschitz: Optional[float] = None
    L_seed: int = 0
    power_iterations: int = 200
    power_rtol: float = 1e-4
    power_safety: float = 1.01
    stall_window: int = 1000
    debug_residual: bool = False

    def __post_init__(self) -> None:
        self.algorithm = Algorithm.parse(self.algorithm)

        if self.alpha_policy is None:
            self.alpha_policy = AlphaPolicy.CONSTANT_INV_L if self.algorithm is Algorithm.FISTA else AlphaPolicy.BB_LINE_SEARCH

        elif not isinstance(self.alpha_policy, AlphaPolicy):
            self.alpha_policy = AlphaPolicy(self.alpha_policy)

        if isinstance(self.termination, str):
            self.termination = parse_termination(self.termination)

        if not self.tol > 0:
            raise ValueError("tol must be positive, got {}.".format(self.tol))

        if int(self.mv_budget) < 1:
            raise ValueError("mv_budget must be at least 1, got {}.".format(self.mv_budget))

        self.mv_budget = int(self.mv_budget)

        if self.c < 0:
            raise ValueError("c must be nonnegative, got {}.".format(self.c))

        if self.alpha_bal is not None and not self.alpha_bal > 0:
            raise ValueError("alpha_bal must be positive, got {}.".format(self.alpha_bal))

        if not self.alpha_bal_factor > 0:
            raise ValueError("alpha_bal_factor must be positive, got {}.".format(self.alpha_bal_factor))

        if self.lipschitz is not None and not self.lipschitz > 0:
            raise ValueError("lipschitz must be positive, got {}.".format(self.lipschitz))

        if self.ls_memory < 1 or self.max_halvings < 0 or self.stall_window < 1:
            raise ValueError("ls_memory and stall_window must be positive and max_halvings nonnegative.")

    @classmethod
    def from_dict(cls, config: dict, **overrides) -> "SolverConfig":
        """
        Build a SolverConfig from the "solver" section of .config.json.
        Unknown keys are ignored; keyword overrides that are None are skipped.
        """
        names = {f.name for f in fields(cls)}
        kwargs = {k: v for k, v in config.items() if k in names}
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)


def parse_termination(name: str, F_star: Optional[float] = None) -> Termination:
    if name in ("subgradient", "subgrad", "v"):
        return SubgradientNorm()

    if name in ("reference", "fstar"):
        if F_star is None:
            raise ValueError("Reference-objective termination needs F_star.")

        return ReferenceObjective(float(F_star))

    raise ValueError("Unknown termination rule {}. Choose from subgradient, reference.".format(name))
