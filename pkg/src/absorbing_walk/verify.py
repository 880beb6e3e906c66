"""Acceptance suite - check the closed forms against oracles and identities.

Each check measures one residual and compares it with a threshold. Checks
never raise: a numerical exception inside a check becomes an ERROR result, so
the report always lists every criterion.

The quick level runs coarse grids of every check; the full level runs the
complete acceptance grid.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from rich.console import Console
from rich.table import Table

from .exceptions import AbsorbingWalkError, InvalidArgumentError
from .observables import (
    absorption_probability,
    survival,
    survival_curve,
)
from .oracle import bessel_oracle, oracle_column, oracle_resolvent
from .propagator import (
    AmplitudeVector,
    TimePoint,
    cone_cutoff,
    pole_propagator,
    propagate_state,
    propagator_column,
)
from .resolvent import (
    WalkParams,
    boundary_pole,
    green_absorbing,
    green_boundary,
    green_hard_wall,
    q_of_z,
)
from .special_functions import bessel_j_row
from .wigner import (
    localization_length,
    wigner_field,
    wigner_pole_closed_form,
    wigner_pole_cosine_form,
    wigner_strong_decomposition,
    wigner_weak_decomposition,
)

logger = logging.getLogger(__name__)

LEVELS = ("quick", "full")
# Fixed seed for the random spectral points of the resolvent check.
RESOLVENT_SEED = 20240611


class CheckStatus(Enum):
    """Outcome of one acceptance check."""

    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"


@dataclass
class CheckResult:
    """Measured residual of one acceptance criterion."""

    name: str
    criterion: str
    status: CheckStatus
    measured: float
    threshold: float
    messages: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "criterion": self.criterion,
            "status": self.status.value,
            "measured": self.measured if math.isfinite(self.measured) else None,
            "threshold": self.threshold,
            "messages": list(self.messages),
        }


@dataclass
class VerificationReport:
    """All check results of one suite run."""

    level: str
    results: List[CheckResult]

    @property
    def checks_passed(self) -> int:
        return sum(1 for r in self.results if r.status is CheckStatus.PASS)

    @property
    def checks_failed(self) -> int:
        return len(self.results) - self.checks_passed

    @property
    def passed(self) -> bool:
        return self.checks_failed == 0

    def to_dict(self) -> Dict[str, object]:
        return {
            "level": self.level,
            "summary": {
                "total_checks": len(self.results),
                "checks_passed": self.checks_passed,
                "checks_failed": self.checks_failed,
            },
            "results": [r.to_dict() for r in self.results],
        }


def _judge(name: str, criterion: str, measured: float, threshold: float,
           messages: Optional[List[str]] = None) -> CheckResult:
    ok = math.isfinite(measured) and measured < threshold
    return CheckResult(
        name=name,
        criterion=criterion,
        status=CheckStatus.PASS if ok else CheckStatus.FAIL,
        measured=float(measured),
        threshold=threshold,
        messages=messages or [],
    )


def _judge_parts(name: str, criterion: str, parts: Dict[str, Tuple[float, float]]) -> CheckResult:
    """Judge several residuals at once; measured is the worst residual/limit ratio."""
    messages = [f"{label}: {value:.3e} (limit {limit:.0e})" for label, (value, limit) in parts.items()]
    ratio = max(value / limit if math.isfinite(value) else float("inf") for value, limit in parts.values())
    return _judge(name, criterion + " (worst residual / limit)", ratio, 1.0, messages)


def _worst(current: float, a: np.ndarray, b: np.ndarray) -> float:
    return max(current, float(np.max(np.abs(np.asarray(a) - np.asarray(b)))))


class AcceptanceSuite:
    """Runs the acceptance criteria at a given level.

    Usage:
        suite = AcceptanceSuite("quick")
        report = suite.run()
        if not report.passed:
            ...
    """

    def __init__(self, level: str = "quick"):
        """Initialize the suite.

        Args:
            level: "quick" (coarse grids) or "full" (entire acceptance grid)
        """
        if level not in LEVELS:
            raise InvalidArgumentError(f"level must be one of {LEVELS}, got {level!r}")
        self.level = level
        self.full = level == "full"

    def checks(self) -> List[Callable[[], CheckResult]]:
        return [
            self.check_oracle_equivalence,
            self.check_unitarity,
            self.check_duality,
            self.check_crossover_asymptote,
            self.check_coupling_slopes,
            self.check_first_passage,
            self.check_pole_structure,
            self.check_wigner_invariants,
            self.check_resolvent,
            self.check_special_functions,
            self.check_crossover_continuity,
        ]

    def run(self) -> VerificationReport:
        results = []
        for check in self.checks():
            name = check.__name__.replace("check_", "")
            try:
                result = check()
            except AbsorbingWalkError as exc:
                logger.warning("check %s raised %s", name, exc)
                result = CheckResult(name, "raised", CheckStatus.ERROR, float("nan"), 0.0,
                                     [f"{type(exc).__name__}: {exc}"])
            logger.debug("check %s: %s measured=%.3e", name, result.status.value, result.measured)
            results.append(result)
        return VerificationReport(self.level, results)

    # -- propagator -----------------------------------------------------------------

    def check_oracle_equivalence(self) -> CheckResult:
        etas = (0.25, 0.5, 1.0, 2.0, 4.0)
        starts = (1, 3, 8) if self.full else (1, 8)
        xs = [0.5 * j for j in range(61)] if self.full else [0.0, 0.5, 6.0, 12.0, 30.0]
        worst = 0.0
        for eta in etas:
            params = WalkParams.from_eta(eta)
            for s0 in starts:
                for x in xs:
                    tp = TimePoint.at(x, params.omega)
                    cutoff = cone_cutoff(s0, x)
                    exact = propagator_column(s0, tp, params, cutoff)
                    reference = oracle_column(s0, tp, params)
                    worst = _worst(worst, exact, reference[:cutoff])
        return _judge("oracle_equivalence", "max |K_exact - K_oracle|", worst, 1e-8)

    def check_unitarity(self) -> CheckResult:
        params = WalkParams(1.0, 0.0)
        xs = [0.5 * j for j in range(61)] if self.full else [0.0, 5.0, 15.0, 30.0]
        worst = max(abs(survival(8, TimePoint.at(x, 1.0), params) - 1.0) for x in xs)
        return _judge("unitarity", "kappa=0: max |S - 1|", worst, 1e-10)

    def check_crossover_continuity(self) -> CheckResult:
        below = WalkParams.from_eta(1.0 - 1e-6)
        above = WalkParams.from_eta(1.0 + 1e-6)
        xs = (2.0, 6.0, 12.0) if self.full else (6.0,)
        gap = 0.0
        oracle_gap = 0.0
        for x in xs:
            tp = TimePoint.at(x, 1.0)
            cutoff = cone_cutoff(2, x)
            weak = propagator_column(2, tp, below, cutoff)
            strong = propagator_column(2, tp, above, cutoff)
            gap = _worst(gap, weak, strong)
            oracle_gap = _worst(oracle_gap, weak, oracle_column(2, tp, below)[:cutoff])
            oracle_gap = _worst(oracle_gap, strong, oracle_column(2, tp, above)[:cutoff])
        return _judge_parts("crossover_continuity", "eta = 1 -/+ 1e-6 branches", {
            "branch gap": (gap, 1e-4),
            "oracle gap": (oracle_gap, 1e-8),
        })

    # -- absorption probability -----------------------------------------------------

    def check_duality(self) -> CheckResult:
        worst = 0.0
        for eta in (0.1, 0.25, 0.5, 2.0, 4.0, 10.0):
            for s0 in (1, 2, 4, 8):
                worst = max(worst, abs(absorption_probability(s0, eta) - absorption_probability(s0, 1.0 / eta)))
        return _judge("duality", "max |P_abs(eta) - P_abs(1/eta)|", worst, 1e-12)

    def check_crossover_asymptote(self) -> CheckResult:
        limit = 1.0 - 2.0 / math.pi
        far = abs(absorption_probability(200, 1.0) - limit)
        near = abs(absorption_probability(10, 1.0) - limit)
        messages = [f"deviation at s0=10: {near:.3e}", f"deviation at s0=200: {far:.3e}"]
        measured = far if far < near else float("inf")
        return _judge("crossover_asymptote", "|P_abs(200, 1) - (1 - 2/pi)|", measured, 5e-3, messages)

    def check_coupling_slopes(self) -> CheckResult:
        weak = absorption_probability(50, 1e-3) * math.pi / (4.0 * 1e-3)
        strong = absorption_probability(50, 1e3) * math.pi * 1e3 / 4.0
        return _judge_parts("coupling_slopes", "P_abs slopes against 4/pi", {
            "weak ratio - 1": (abs(weak - 1.0), 1e-2),
            "strong ratio - 1": (abs(strong - 1.0), 1e-2),
        })

    # -- first passage ----------------------------------------------------------------

    def check_first_passage(self) -> CheckResult:
        dt = 0.01
        steps = 3000 if self.full else 500
        times = [j * dt for j in range(steps + 1)]
        worst = 0.0
        for eta in (0.25, 1.0, 4.0):
            rows = survival_curve(8, times, WalkParams.from_eta(eta))
            S = np.array([row[1] for row in rows])
            F = np.array([row[2] for row in rows])
            absorbed = np.concatenate(([0.0], np.cumsum(0.5 * dt * (F[1:] + F[:-1]))))
            worst = max(worst, float(np.max(np.abs(S + absorbed - 1.0))))
        return _judge("first_passage", "max |S + int F - 1| (trapezoid, dt=0.01)", worst, 1e-6)

    # -- boundary mode ----------------------------------------------------------------

    def check_pole_structure(self) -> CheckResult:
        params = WalkParams.from_eta(4.0)
        pole = boundary_pole(params)
        z_error = abs(pole.z_p - complex(1.0, -1.875))
        tp = TimePoint.at(3.0, 1.0)
        ratios = [
            abs(pole_propagator(s + 1, 2, tp, params)) / abs(pole_propagator(s, 2, tp, params))
            for s in range(1, 12)
        ]
        ratio_error = max(abs(r - 0.25) for r in ratios)
        xi_error = abs(localization_length(4.0) - 1.0 / math.log(4.0))
        return _judge_parts("pole_structure", "boundary mode at eta = 4", {
            "z_p": (z_error, 1e-14),
            "site ratio": (ratio_error, 1e-14),
            "localization length": (xi_error, 1e-14),
        })

    # -- Wigner function --------------------------------------------------------------

    def _wigner_residuals(self, params: WalkParams, s0: int, x: float) -> Dict[str, float]:
        tp = TimePoint.at(x, params.omega)
        m_max = 2 * cone_cutoff(s0, x)
        k_nodes = 2 * m_max
        state = propagate_state(AmplitudeVector.localized(s0, params=params), tp, params)
        field_ = wigner_field(state, m_max, k_nodes, tp)

        marginal = field_.k_marginal()
        populations = np.zeros(field_.m_values.size)
        even = field_.m_values % 2 == 0
        sites = field_.m_values[even] // 2
        populations[even] = [abs(state.at_site(int(s))) ** 2 for s in sites]

        if params.is_strong:
            decomposed = wigner_strong_decomposition(s0, m_max, k_nodes, tp, params)
        else:
            decomposed = wigner_weak_decomposition(s0, m_max, k_nodes, tp, params)
        residuals = {
            "realness": max(field_.imag_residue, decomposed.imag_residue),
            "marginal": float(np.max(np.abs(marginal - populations))),
            "trace": abs(field_.trace() - survival(s0, tp, params)),
            "recombination": float(np.max(np.abs(decomposed.total - field_.total))),
        }
        if params.is_strong:
            worst = 0.0
            pp = decomposed.channels["pp"]
            for m in range(2, 13):
                for k in np.linspace(-math.pi, math.pi, 64, endpoint=False):
                    closed = wigner_pole_closed_form(m, k, tp, s0, params)
                    worst = max(worst, abs(closed - wigner_pole_cosine_form(m, k, tp, s0, params)))
                row = m - 2
                closed_row = [wigner_pole_closed_form(m, k, tp, s0, params) for k in decomposed.k_values]
                worst = max(worst, float(np.max(np.abs(pp[row] - closed_row))))
            residuals["pole_forms"] = worst
        return residuals

    def check_wigner_invariants(self) -> CheckResult:
        points = [(WalkParams(1.0, 1.5), 3, 6.0), (WalkParams.from_eta(0.5), 3, 6.0)]
        if self.full:
            points += [(WalkParams(1.0, 1.5), 3, 2.0), (WalkParams.from_eta(0.5), 3, 12.0)]
        limits = {"realness": 1e-12, "marginal": 1e-8, "trace": 1e-8,
                  "recombination": 1e-12, "pole_forms": 1e-12}
        worst = {name: 0.0 for name in limits}
        for params, s0, x in points:
            for name, value in self._wigner_residuals(params, s0, x).items():
                worst[name] = max(worst[name], value)
        return _judge_parts("wigner_invariants", "Wigner field invariants",
                            {name: (worst[name], limits[name]) for name in limits})

    # -- resolvent --------------------------------------------------------------------

    def check_resolvent(self) -> CheckResult:
        rng = np.random.default_rng(RESOLVENT_SEED)
        count = 200 if self.full else 40
        oracle_count = 50 if self.full else 10
        identity = 0.0
        oracle = 0.0
        for j in range(count):
            params = WalkParams(1.0, (0.8, 1.5, 3.0)[j % 3])
            z = complex(rng.uniform(-1.0, 3.0), rng.uniform(0.2, 1.0))
            s, s0 = (int(v) for v in rng.integers(1, 7, size=2))
            sv = q_of_z(z, params.omega)
            G = green_absorbing(s, s0, sv, params)
            G1 = green_absorbing(1, s0, sv, params)
            dyson = G - green_hard_wall(s, s0, sv, params.omega) \
                + 0.5j * params.kappa * green_hard_wall(s, 1, sv, params.omega) * G1
            boundary = G1 - green_boundary(s0, sv, params)
            identity = max(identity, abs(dyson), abs(boundary))
            if j < oracle_count:
                oracle = max(oracle, abs(G - oracle_resolvent(s, s0, z, params, 200)))
        return _judge_parts("resolvent", "resolvent identities and direct solves", {
            "Dyson/boundary identities": (identity, 1e-12),
            "oracle solves": (oracle, 1e-10),
        })

    # -- Bessel functions -------------------------------------------------------------

    def check_special_functions(self) -> CheckResult:
        xs = (0.1, 1.0, 5.0, 20.0, 50.0) if self.full else (1.0, 20.0)
        orders = range(31) if self.full else range(0, 31, 5)
        oracle = 0.0
        recurrence = 0.0
        for x in xs:
            row = bessel_j_row(x, 60)
            for n in orders:
                oracle = max(oracle, abs(row.order(n) - bessel_oracle(n, x)))
            n = np.arange(1, 60)
            values = row.values
            residual = values[n - 1] + values[n + 1] - (2.0 * n / x) * values[n]
            recurrence = max(recurrence, float(np.max(np.abs(residual))))
        return _judge_parts("special_functions", "Bessel rows", {
            "integral oracle": (oracle, 1e-12),
            "recurrence": (recurrence, 1e-12),
        })


def render_table(report: VerificationReport, console: Console) -> None:
    """Print the report as a rich table."""
    table = Table(title=f"Acceptance suite ({report.level})")
    table.add_column("Check")
    table.add_column("Criterion")
    table.add_column("Measured", justify="right")
    table.add_column("Threshold", justify="right")
    table.add_column("Status")
    for result in report.results:
        style = "green" if result.status is CheckStatus.PASS else "red"
        table.add_row(
            result.name,
            result.criterion,
            f"{result.measured:.3e}",
            f"{result.threshold:.0e}",
            f"[{style}]{result.status.value}[/{style}]",
        )
    console.print(table)
    for result in report.results:
        if result.status is not CheckStatus.PASS:
            for message in result.messages:
                console.print(f"  {result.name}: {message}")
    console.print(f"Passed: {report.checks_passed}  Failed: {report.checks_failed}")
