"""Forward sweeps and inverse fits over layered-medium parameters."""

import itertools
import logging
import threading
import time
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
from scipy import optimize

from layered_gsm.files.cache import WMatrixCache
from layered_gsm.files.config import (
    FitConfig,
    FitMethod,
    OutputFormat,
    SweepConfig,
    apply_parameter,
)
from layered_gsm.files.gsmio import GsmFile
from layered_gsm.files.writers import read_observed, write_csv, write_touchstone
from layered_gsm.solver.exceptions import ValidationError
from layered_gsm.solver.fingerprint import configuration_payload
from layered_gsm.solver.fresnel import wavenumber
from layered_gsm.solver.interaction import SolveOptions, gamma_composite
from layered_gsm.solver.models import LayerStack
from layered_gsm.solver.options import ComputeOptions
from layered_gsm.solver.wmatrix import WMatrix, assemble_w, truncation
from layered_gsm.sweep.results import SweepPoint, SweepResult, TimingReport
from layered_gsm.sweep.worker_pool import WorkerPool

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]

# Relative simplex edge in normalised parameter coordinates.
_SIMPLEX_STEP = 0.1


class Evaluation(NamedTuple):
    """Composite response of one stack at one frequency."""

    composite: ComplexArray
    fingerprint: str
    w_seconds: float
    solve_seconds: float
    cache_hit: bool


class ForwardModel:
    """Composite port response of one antenna GSM above varying stacks.

    Interaction matrices are looked up by configuration fingerprint before
    being assembled, so repeated configurations cost only the feedback
    solve.
    """

    def __init__(
        self,
        gsm: GsmFile,
        compute: ComputeOptions | None = None,
        solve: SolveOptions | None = None,
        cache: WMatrixCache | None = None,
    ) -> None:
        """Initialize the model.

        Args:
        ----
            gsm: Antenna GSM file; every evaluated frequency must be in it.
            compute: Truncation and quadrature options. The degree always
                follows the file.
            solve: Feedback solve options.
            cache: Interaction-matrix cache; a private in-memory cache is
                used when None.

        """
        options = compute or ComputeOptions()
        self.gsm: GsmFile = gsm
        self.compute: ComputeOptions = replace(options, l_max=gsm.l_max)
        self.solve: SolveOptions = solve or SolveOptions()
        self.cache: WMatrixCache = (
            cache
            if cache is not None
            else WMatrixCache(
                options.cache_dir, max_entries=options.cache_entries
            )
        )
        self.assembled: int = 0
        self._provider = self.compute.fingerprint_provider()
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard: threading.Lock = threading.Lock()

    def _lock_for(self, fingerprint: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(fingerprint, threading.Lock())

    def interaction(
        self, stack: LayerStack, frequency: float
    ) -> tuple[WMatrix, bool]:
        """Interaction matrix for ``stack`` at ``frequency`` and a hit flag.

        Raises
        ------
            FrequencyNotFoundError: If the frequency is not in the GSM file.
            ValidationError: If the top medium is lossy.

        """
        blocks = self.gsm.at(frequency)
        omega = 2.0 * np.pi * blocks.frequency
        k = wavenumber(stack.top, omega)
        if k.imag != 0.0:
            err = "The medium containing the antenna must be lossless"
            raise ValidationError(err)
        _, contour = truncation(k.real, self.gsm.r_min, self.compute)
        payload = configuration_payload(
            stack, blocks.frequency, blocks.basis, contour
        )
        fingerprint = self._provider.fingerprint(payload)
        with self._lock_for(fingerprint):
            cached = self.cache.get(fingerprint, blocks.basis)
            if cached is not None:
                logger.debug("Interaction matrix cache hit %s", fingerprint)
                return cached, True
            matrix = assemble_w(
                blocks.basis,
                stack,
                k.real,
                omega,
                contour,
                overflow_cap=self.compute.overflow_cap,
                fingerprint_provider=self._provider,
            )
            # Keyed by the file frequency, which omega may not round-trip.
            matrix = replace(
                matrix, frequency=blocks.frequency, fingerprint=fingerprint
            )
            self.cache.put(matrix, fingerprint)
            with self._locks_guard:
                self.assembled += 1
        return matrix, False

    def evaluate(self, stack: LayerStack, frequency: float) -> Evaluation:
        """Composite port matrix for ``stack`` at ``frequency``."""
        start = time.perf_counter()
        w, hit = self.interaction(stack, frequency)
        w_done = time.perf_counter()
        composite = gamma_composite(self.gsm.at(frequency), w, self.solve)
        solve_done = time.perf_counter()
        return Evaluation(
            composite,
            w.fingerprint,
            w_done - start,
            solve_done - w_done,
            hit,
        )


@dataclass(frozen=True)
class _SweepTask:
    index: int
    parameters: dict[str, float]
    frequency: float
    stack: LayerStack


def _sweep_tasks(
    config: SweepConfig, frequencies: Sequence[float]
) -> list[_SweepTask]:
    """Parameter combinations outermost, frequency innermost."""
    names = tuple(config.axes)
    tasks: list[_SweepTask] = []
    for combination in itertools.product(*config.axes.values()):
        parameters = dict(zip(names, combination))
        stack = config.stack
        for name, value in parameters.items():
            stack = apply_parameter(stack, name, value)
        base = len(tasks)
        tasks.extend(
            _SweepTask(base + position, parameters, frequency, stack)
            for position, frequency in enumerate(frequencies)
        )
    return tasks


def run_sweep(
    config: SweepConfig,
    *,
    cache: WMatrixCache | None = None,
) -> SweepResult:
    """Evaluate the composite response at every sweep point.

    Points are dispatched to ``config.compute.num_workers`` threads and
    returned in sweep order.

    Raises
    ------
        FrequencyNotFoundError: If a requested frequency is not in the GSM
            file; raised before any point is evaluated.

    """
    start = time.perf_counter()
    gsm = config.source.load()
    frequencies = config.frequencies or gsm.frequencies
    for frequency in frequencies:
        _ = gsm.at(frequency)
    model = ForwardModel(gsm, config.compute, config.solve, cache)
    tasks = _sweep_tasks(config, frequencies)
    logger.info(
        "Sweeping %d point(s) on %d worker(s)",
        len(tasks),
        config.compute.num_workers,
    )

    def evaluate(task: _SweepTask) -> SweepPoint:
        evaluation = model.evaluate(task.stack, task.frequency)
        return SweepPoint(
            index=task.index,
            parameters=task.parameters,
            frequency=task.frequency,
            composite=evaluation.composite,
            port_labels=gsm.port_labels,
            fingerprint=evaluation.fingerprint,
            w_seconds=evaluation.w_seconds,
            solve_seconds=evaluation.solve_seconds,
            cache_hit=evaluation.cache_hit,
        )

    pool: WorkerPool[_SweepTask, SweepPoint] = WorkerPool(
        evaluate, num_workers=config.compute.num_workers
    )
    points = tuple(pool.run(tasks))
    timing = TimingReport(
        points=len(points),
        assembled=model.assembled,
        cache_hits=sum(point.cache_hit for point in points),
        w_seconds=sum(point.w_seconds for point in points),
        solve_seconds=sum(point.solve_seconds for point in points),
        total_seconds=time.perf_counter() - start,
    )
    logger.info("Sweep finished: %s", timing.summary())
    return SweepResult(points, timing, tuple(config.axes))


def write_sweep(
    result: SweepResult,
    path: Path,
    output_format: OutputFormat = OutputFormat.CSV,
) -> list[Path]:
    """Write sweep results in the requested format."""
    if output_format is OutputFormat.TOUCHSTONE:
        return write_touchstone(result.points, path, result.axes)
    return [write_csv(result.points, path, result.axes)]


@dataclass(frozen=True)
class FitResult:
    """Outcome of an inverse fit.

    Attributes
    ----------
        parameters: Best parameter values found.
        misfit: Normalised misfit at the best parameters.
        history: Misfit of every forward evaluation in order.
        evaluations: Number of forward evaluations.
        converged: False when the optimizer stopped without meeting its
            tolerances; the best-so-far parameters are still returned.
        message: Optimizer status message.

    """

    parameters: dict[str, float]
    misfit: float
    history: tuple[float, ...] = field(repr=False)
    evaluations: int
    converged: bool
    message: str

    def as_dict(self) -> dict[str, object]:
        """Plain-data view for reports."""
        return {
            "parameters": self.parameters,
            "misfit": self.misfit,
            "history": list(self.history),
            "evaluations": self.evaluations,
            "converged": self.converged,
            "message": self.message,
        }


class _FitProblem:
    """Normalised least-squares misfit over the free parameters.

    Parameters are mapped to ``[0, 1]`` by their bounds so a single simplex
    step suits parameters of very different scale.
    """

    def __init__(self, config: FitConfig, model: ForwardModel) -> None:
        self.config: FitConfig = config
        self.model: ForwardModel = model
        self.names: tuple[str, ...] = tuple(p.name for p in config.parameters)
        self.lower: npt.NDArray[np.float64] = np.asarray(
            [p.lower for p in config.parameters]
        )
        self.upper: npt.NDArray[np.float64] = np.asarray(
            [p.upper for p in config.parameters]
        )
        self.history: list[float] = []
        self.best: tuple[float, npt.NDArray[np.float64]] = (
            np.inf,
            np.asarray([p.start for p in config.parameters]),
        )
        self.observed: list[tuple[float, ComplexArray, ComplexArray]] = (
            self._observed_matrices()
        )
        self.scale: float = sum(
            float(np.sum(np.abs(values) ** 2))
            for _, values, _ in self.observed
        ) or 1.0

    def _observed_matrices(
        self,
    ) -> list[tuple[float, ComplexArray, ComplexArray]]:
        """Observed values and a mask per frequency, in port-matrix layout."""
        labels = self.model.gsm.port_labels
        positions = {label: index for index, label in enumerate(labels)}
        size = len(labels)
        matrices: list[tuple[float, ComplexArray, ComplexArray]] = []
        for frequency, entries in sorted(
            read_observed(self.config.observed).items()
        ):
            values = np.zeros((size, size), dtype=np.complex128)
            mask = np.zeros((size, size), dtype=np.complex128)
            for (port_i, port_j), value in entries.items():
                if port_i not in positions or port_j not in positions:
                    err = (
                        f"Observed port pair ({port_i}, {port_j}) is not in "
                        f"the GSM ports {labels}"
                    )
                    raise ValidationError(err)
                values[positions[port_i], positions[port_j]] = value
                mask[positions[port_i], positions[port_j]] = 1.0
            _ = self.model.gsm.at(frequency)
            matrices.append((frequency, values, mask))
        return matrices

    def to_physical(
        self, scaled: npt.NDArray[np.float64]
    ) -> npt.NDArray[np.float64]:
        clipped = np.clip(scaled, 0.0, 1.0)
        return self.lower + clipped * (self.upper - self.lower)

    def to_scaled(
        self, values: npt.NDArray[np.float64]
    ) -> npt.NDArray[np.float64]:
        return (values - self.lower) / (self.upper - self.lower)

    def misfit(self, values: npt.NDArray[np.float64]) -> float:
        stack = self.config.stack
        for name, value in zip(self.names, values):
            stack = apply_parameter(stack, name, float(value))
        total = 0.0
        for frequency, observed, mask in self.observed:
            composite = self.model.evaluate(stack, frequency).composite
            total += float(np.sum(np.abs((composite - observed) * mask) ** 2))
        result = total / self.scale
        self.history.append(result)
        if result < self.best[0]:
            self.best = (result, np.asarray(values, dtype=np.float64).copy())
        logger.debug(
            "Fit evaluation %d: misfit %.6e", len(self.history), result
        )
        return result

    def objective(self, scaled: npt.NDArray[np.float64]) -> float:
        return self.misfit(self.to_physical(scaled))


def _initial_simplex(
    start: npt.NDArray[np.float64], step: float
) -> npt.NDArray[np.float64]:
    vertices = [start]
    for axis in range(start.size):
        vertex = start.copy()
        vertex[axis] += step if start[axis] + step <= 1.0 else -step
        vertices.append(vertex)
    return np.asarray(vertices)


def _nelder_mead(
    problem: _FitProblem,
    start: npt.NDArray[np.float64],
    step: float,
    budget: int,
) -> tuple[bool, str]:
    result = optimize.minimize(
        problem.objective,
        start,
        method="Nelder-Mead",
        bounds=[(0.0, 1.0)] * start.size,
        options={
            "maxfev": budget,
            "xatol": problem.config.tolerance,
            "fatol": problem.config.tolerance**2,
            "initial_simplex": _initial_simplex(start, step),
        },
    )
    return bool(result.success), str(result.message)


def _grid_start(problem: _FitProblem) -> tuple[npt.NDArray[np.float64], float]:
    """Best point of a coarse grid using at most half the budget."""
    dimension = len(problem.names)
    per_axis = problem.config.grid_points
    half_budget = problem.config.max_evaluations // 2
    while per_axis > 2 and per_axis**dimension > half_budget:
        per_axis -= 1
    axis = np.linspace(0.0, 1.0, per_axis)
    best_value = np.inf
    best_point = np.full(dimension, 0.5)
    for point in itertools.product(axis, repeat=dimension):
        candidate = np.asarray(point)
        value = problem.objective(candidate)
        if value < best_value:
            best_value, best_point = value, candidate
    return best_point, 0.5 / (per_axis - 1)


def run_fit(
    config: FitConfig,
    *,
    cache: WMatrixCache | None = None,
) -> FitResult:
    """Fit the free stack parameters to the observed composite responses.

    The misfit is ``sum |Gamma_c(model) - Gamma_c(observed)|^2`` over every
    observed entry, divided by ``sum |Gamma_c(observed)|^2``. Without free
    parameters the misfit of the template stack is evaluated once.
    """
    gsm = config.source.load()
    model = ForwardModel(gsm, config.compute, config.solve, cache)
    problem = _FitProblem(config, model)

    if not problem.names:
        misfit = problem.misfit(np.zeros(0))
        return FitResult({}, misfit, tuple(problem.history), 1, True, "")

    start = problem.to_scaled(problem.best[1])
    step = _SIMPLEX_STEP
    if config.method is FitMethod.GRID_THEN_REFINE:
        start, step = _grid_start(problem)
    remaining = max(config.max_evaluations - len(problem.history), 1)
    success, message = _nelder_mead(problem, start, step, remaining)

    misfit, values = problem.best
    converged = success and len(problem.history) <= config.max_evaluations
    if not converged:
        logger.warning(
            "Fit did not converge after %d evaluation(s): %s; "
            "returning the best parameters found",
            len(problem.history),
            message,
        )
    parameters = {
        name: float(value) for name, value in zip(problem.names, values)
    }
    logger.info(
        "Fit finished after %d evaluation(s), misfit %.3e",
        len(problem.history),
        misfit,
    )
    return FitResult(
        parameters,
        misfit,
        tuple(problem.history),
        len(problem.history),
        converged,
        message,
    )
