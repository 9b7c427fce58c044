"""Side-by-side solver runs, convergence-history export and stagnation flags.

``run_compare`` executes a list of solver configurations on one problem from
a shared start vector, cross-checks converged solutions against the dense
Drazin oracle (below a size cap), and packages everything as a
:class:`RunReport`.  Histories export to CSV with 17-significant-digit
floats (exact float64 round-trip) and to a gnuplot-friendly two-column
variant.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .adgmres import adgmres_restarted
from .dgmres import RunHistory, SolverConfig, dgmres_restarted
from .problems import ProblemSpec

__all__ = [
    "FairnessWarning",
    "RunReport",
    "RunSpec",
    "SolverOutcome",
    "cycles_to_tolerance",
    "export_history",
    "export_plot_data",
    "run_compare",
    "run_solvers",
    "stagnation_flag",
]

#: problems larger than this skip the dense oracle cross-check
ORACLE_SIZE_CAP = 500

#: stagnation criterion: improvement below this factor over the window
STAGNATION_FACTOR = 10.0
STAGNATION_WINDOW = 50


class FairnessWarning(UserWarning):
    """Compared solvers do not use the same augmented-subspace size."""


@dataclass(frozen=True)
class RunSpec:
    """One solver configuration: method name, restart depth, augmentation count."""

    method: str
    m: int
    k: int = 0

    def __post_init__(self):
        if self.method not in ("dgmres", "adgmres"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "dgmres" and self.k != 0:
            raise ValueError("k applies to adgmres only; use adgmres or k=0")
        if self.k < 0:
            raise ValueError("k must be nonnegative")

    @property
    def label(self):
        if self.method == "adgmres":
            return f"adgmres({self.m},{self.k})"
        return f"dgmres({self.m})"


@dataclass(frozen=True)
class SolverOutcome:
    """One solver's history plus derived verdicts."""

    label: str
    spec: RunSpec
    history: RunHistory
    stagnated: bool
    cycles_to_tol: int | None
    oracle_error: float | None


@dataclass(frozen=True)
class RunReport:
    """Everything produced by one comparison run."""

    size: int
    index_a: int
    eps: float
    outcomes: list[SolverOutcome] = field(default_factory=list)
    oracle_solution: np.ndarray | None = None


def stagnation_flag(history, window=STAGNATION_WINDOW, factor=STAGNATION_FACTOR):
    """True iff the run stopped short of tolerance and the relative seminorm
    improved by less than ``factor`` over the trailing ``window`` cycles."""
    if history.converged:
        return False
    records = history.records
    if len(records) < window + 1:
        return False
    old = records[-window - 1].relative_seminorm
    new = records[-1].relative_seminorm
    if new == 0.0:
        return False
    return old / new < factor


def cycles_to_tolerance(history):
    """Cycle count at which the run first met tolerance, or ``None``."""
    if not history.converged:
        return None
    return history.records[-1].cycle


def _check_fairness(runs):
    dg = [r for r in runs if r.method == "dgmres"]
    ad = [r for r in runs if r.method == "adgmres"]
    mismatched = [(d, a) for d in dg for a in ad if d.m != a.m + a.k]
    if mismatched:
        pairs = "; ".join(f"{d.label} vs {a.label}" for d, a in mismatched)
        warnings.warn(
            f"subspace sizes differ (m_dgmres != m_adgmres + k): {pairs}",
            FairnessWarning, stacklevel=3)


def _unique_labels(runs):
    seen = {}
    labels = []
    for spec in runs:
        base = spec.label
        seen[base] = seen.get(base, 0) + 1
        labels.append(base if seen[base] == 1 else f"{base}#{seen[base]}")
    return labels


def run_solvers(A, b, index_a, runs, eps=1e-12, max_cycles=10000, x0=None,
                oracle_size_cap=ORACLE_SIZE_CAP):
    """Run each configured solver on ``(A, b)`` from the same start vector."""
    if not runs:
        raise ValueError("no solver runs configured")
    _check_fairness(runs)
    n = A.shape[0]
    oracle_solution = None
    if n <= oracle_size_cap:
        oracle_solution = oracle.drazin_solution(A, b)
    outcomes = []
    for spec, label in zip(runs, _unique_labels(runs)):
        cfg = SolverConfig(index_a=index_a, restart_m=spec.m, tol_eps=eps,
                           max_cycles=max_cycles)
        if spec.method == "adgmres":
            history = adgmres_restarted(A, b, x0, spec.k, cfg)
        else:
            history = dgmres_restarted(A, b, x0, cfg)
        err = None
        if oracle_solution is not None:
            scale = float(np.linalg.norm(oracle_solution))
            diff = float(np.linalg.norm(history.final_x - oracle_solution))
            err = diff / scale if scale > 0 else diff
        outcomes.append(SolverOutcome(label=label, spec=spec, history=history,
                                      stagnated=stagnation_flag(history),
                                      cycles_to_tol=cycles_to_tolerance(history),
                                      oracle_error=err))
    return RunReport(size=n, index_a=index_a, eps=eps, outcomes=outcomes,
                     oracle_solution=oracle_solution)


def run_compare(problem, runs, eps=1e-12, max_cycles=10000,
                oracle_size_cap=ORACLE_SIZE_CAP):
    """Resolve a :class:`~drazin.problems.ProblemSpec` and run the comparison."""
    if isinstance(problem, ProblemSpec):
        resolved = problem.resolve()
    else:
        resolved = problem
    return run_solvers(resolved.A, resolved.b, resolved.index_a, runs,
                       eps=eps, max_cycles=max_cycles, x0=resolved.x0,
                       oracle_size_cap=oracle_size_cap)


def export_history(report, path):
    """Write per-cycle histories as CSV.

    Header ``solver,cycle,seminorm,relative_seminorm,wall_time_s``; one row
    per cycle per solver, in configured solver order then ascending cycle;
    floats printed with 17 significant digits so they round-trip exactly.
    Solver labels containing commas are quoted per the CSV convention.
    """
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["solver", "cycle", "seminorm", "relative_seminorm",
                         "wall_time_s"])
        for outcome in report.outcomes:
            for rec in outcome.history.records:
                writer.writerow([outcome.label, rec.cycle,
                                 f"{rec.seminorm:.17g}",
                                 f"{rec.relative_seminorm:.17g}",
                                 f"{rec.wall_time:.17g}"])


def export_plot_data(report, path):
    """Write gnuplot-ready two-column blocks (cycle, relative seminorm).

    Solvers are separated by double blank lines so each can be addressed
    with a gnuplot ``index``.
    """
    with open(path, "w", encoding="ascii") as fh:
        for i, outcome in enumerate(report.outcomes):
            if i:
                fh.write("\n\n")
            fh.write(f"# solver: {outcome.label}\n")
            for rec in outcome.history.records:
                fh.write(f"{rec.cycle} {rec.relative_seminorm:.17g}\n")
