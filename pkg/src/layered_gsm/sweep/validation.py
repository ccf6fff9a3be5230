"""Validation suite: oracle checks, invariant checks and error maps.

Every check is deterministic for a fixed seed and reports a residual next to
the tolerance it is judged against. Error maps tabulate the largest composite
error over a grid of degree truncations and contour truncation points,
against a reference with four more degrees and doubled quadrature.
"""

import json
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import partial

import numpy as np
import numpy.typing as npt

from layered_gsm.files.config import NAMED_STACKS
from layered_gsm.files.gsmio import (
    HORN_PORTS,
    HORN_R_MIN,
    SyntheticGsmSpec,
    SyntheticKind,
    synthesize_gsm,
)
from layered_gsm.solver.exceptions import (
    IllConditionedError,
    ValidationError,
)
from layered_gsm.solver.fresnel import wavenumber
from layered_gsm.solver.interaction import (
    feedback_operator,
    gamma_composite,
    reflection_order_study,
)
from layered_gsm.solver.models import (
    VACUUM,
    ContourOrientation,
    ContourSpec,
    GsmBlocks,
    Layer,
    LayerStack,
    Parity,
    Polarization,
    SvwfBasis,
    SvwfIndex,
)
from layered_gsm.solver.oracle import (
    check_pec_boundary,
    check_pec_image,
    check_reflected_field,
    check_transform_identity,
    plane_grid,
    shell_points,
)
from layered_gsm.solver.options import ComputeOptions
from layered_gsm.solver.wmatrix import WMatrix, assemble_w, truncation
from layered_gsm.sweep.worker_pool import WorkerPool

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]

CHECKS = (
    "transform_identity",
    "pec_image",
    "pec_boundary",
    "orientation_control",
    "reflected_field",
    "w_symmetry",
    "vacuum",
    "reflection_order",
)
DEFAULT_FREQUENCY = 3.5e9
DEFAULT_L_MAX_VALUES = (8, 17)
DEFAULT_MAP_L_VALUES = (5, 8, 11, 14, 17)
DEFAULT_MAP_KAPPA_VALUES = (1.05, 1.15, 1.31, 1.5, 2.0)

SAMPLE_POINTS = 20
TRANSFORM_TOLERANCE = 1e-6
PEC_IMAGE_TOLERANCE = 1e-3
REFLECTED_FIELD_TOLERANCE = 1e-4
SYMMETRY_TOLERANCE = 1e-12
PEC_BOUNDARY_TOLERANCE = 1e-3
# Multiple of the truncation bound allowed below the degree that reaches
# PEC_BOUNDARY_TOLERANCE.
BOUNDARY_HEADROOM = 30.0
# A flipped evanescent segment must break the boundary condition visibly.
ORIENTATION_CONTROL_FLOOR = 0.1
ORDER_STUDY_MAX = 8

# Near-regime boundary check: k |z_I| and lateral extent of the sample grid.
NEAR_KZ = 3.0
NEAR_LATERAL_FRACTION = 0.25
# Evanescent tail below which the contour is truncated in the near regime.
NEAR_TAIL = 1e-12


@dataclass(frozen=True)
class ValidationSelection:
    """Which checks to run and where.

    Attributes
    ----------
        checks: Names from :data:`CHECKS`.
        l_max_values: Degree truncations the per-degree checks run at.
        frequency: Frequency in Hz; the top medium is vacuum.
        seed: Seed of sample points and synthetic GSMs.
        error_maps: Whether to compute the far and near error maps.
        map_l_values: Degree axis of the error maps.
        map_kappa_values: Contour truncation axis of the error maps.
        num_workers: Checks evaluated concurrently.

    """

    checks: tuple[str, ...] = CHECKS
    l_max_values: tuple[int, ...] = DEFAULT_L_MAX_VALUES
    frequency: float = DEFAULT_FREQUENCY
    seed: int = 0
    error_maps: bool = False
    map_l_values: tuple[int, ...] = DEFAULT_MAP_L_VALUES
    map_kappa_values: tuple[float, ...] = DEFAULT_MAP_KAPPA_VALUES
    num_workers: int = 1

    def __post_init__(self) -> None:
        """Reject unknown check names and empty axes."""
        unknown = sorted(set(self.checks) - set(CHECKS))
        if unknown:
            err = f"Unknown check(s): {', '.join(unknown)}"
            raise ValidationError(err)
        if not self.l_max_values or min(self.l_max_values) < 1:
            err = "l_max_values must be non-empty positive integers"
            raise ValidationError(err)
        if not (np.isfinite(self.frequency) and self.frequency > 0):
            err = f"Frequency must be positive, got {self.frequency}"
            raise ValidationError(err)
        if self.error_maps and not (
            self.map_l_values and self.map_kappa_values
        ):
            err = "Error-map axes must not be empty"
            raise ValidationError(err)
        if min(self.map_kappa_values, default=2.0) <= 1.0:
            err = "Error-map contour truncations must exceed 1"
            raise ValidationError(err)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one check."""

    name: str
    l_max: int | None
    residual: float
    tolerance: float
    passed: bool
    details: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict[str, object]:
        """Plain-data view for reports."""
        return {
            "name": self.name,
            "l_max": self.l_max,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": dict(sorted(self.details.items())),
        }


@dataclass(frozen=True)
class ErrorMap:
    """Largest ``|Gamma_c - Gamma_c(reference)|`` over a truncation grid.

    ``errors[a][b]`` belongs to ``l_values[a]`` and ``kappa_values[b]``. An
    entry whose feedback system is too ill-conditioned to solve is ``nan``.
    """

    scenario: str
    z_interface: float
    l_values: tuple[int, ...]
    kappa_values: tuple[float, ...]
    errors: tuple[tuple[float, ...], ...]
    reference_l_max: int
    reference_kappa: float

    def as_dict(self) -> dict[str, object]:
        """Plain-data view for reports."""
        return {
            "scenario": self.scenario,
            "z_interface": self.z_interface,
            "l_values": list(self.l_values),
            "kappa_values": list(self.kappa_values),
            "errors": [
                [value if math.isfinite(value) else None for value in row]
                for row in self.errors
            ],
            "reference_l_max": self.reference_l_max,
            "reference_kappa": self.reference_kappa,
        }


@dataclass(frozen=True)
class ValidationReport:
    """All check results and error maps of one validation run."""

    checks: tuple[CheckResult, ...]
    error_maps: tuple[ErrorMap, ...] = ()

    @property
    def passed(self) -> bool:
        """True when every check passed."""
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> tuple[CheckResult, ...]:
        """Checks that did not pass."""
        return tuple(check for check in self.checks if not check.passed)

    def as_dict(self) -> dict[str, object]:
        """Plain-data view for reports."""
        return {
            "passed": self.passed,
            "checks": [check.as_dict() for check in self.checks],
            "error_maps": [item.as_dict() for item in self.error_maps],
        }

    def to_json(self) -> str:
        """Deterministic JSON rendering of the report."""
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)

    def table(self) -> str:
        """Fixed-width residual table."""
        header = f"{'check':<22}{'l_max':>6}{'residual':>14}"
        lines = [f"{header}{'tolerance':>14}"]
        for check in self.checks:
            degree = "-" if check.l_max is None else str(check.l_max)
            status = "ok" if check.passed else "FAIL"
            lines.append(
                f"{check.name:<22}{degree:>6}{check.residual:>14.3e}"
                f"{check.tolerance:>14.3e}  {status}"
            )
        return "\n".join(lines)


class _Scene:
    """Frequency, wavenumber and far-regime contour shared by the checks."""

    def __init__(self, frequency: float) -> None:
        self.frequency: float = frequency
        self.omega: float = 2.0 * np.pi * frequency
        self.k: float = wavenumber(VACUUM, self.omega).real

    def contour(self, l_max: int) -> ContourSpec:
        """Contour from the truncation rule for a horn-sized antenna."""
        options = ComputeOptions(l_max=l_max)
        return truncation(self.k, HORN_R_MIN, options)[1]

    def assemble(
        self,
        basis: SvwfBasis,
        stack: LayerStack,
        contour: ContourSpec,
        *,
        mirror: bool = True,
    ) -> WMatrix:
        return assemble_w(
            basis, stack, self.k, self.omega, contour, mirror=mirror
        )


def _evanescent_cutoff(l_max: int, kz: float) -> float:
    """Smallest ``kappa`` with a negligible ``(2 kappa)^(L+2) e^(-2 kz kappa)``.

    The exponent covers the growth of a degree-one row against the highest
    degree column on the evanescent segment.
    """
    target = math.log(NEAR_TAIL)
    kappa = 1.0
    while (l_max + 2) * math.log(2.0 * kappa) - 2.0 * kz * kappa > target:
        kappa += 0.25
    return kappa


def _near_setup(
    scene: _Scene, l_max: int, orientation: ContourOrientation
) -> tuple[float, ContourSpec]:
    z_interface = -NEAR_KZ / scene.k
    contour = ContourSpec(
        kappa=_evanescent_cutoff(l_max, NEAR_KZ),
        quad_order_evanescent=96,
        quad_order_propagating=48,
        orientation=orientation,
    )
    return z_interface, contour


def _boundary_tolerance(
    points: npt.NDArray[np.float64], z: float, l_max: int
) -> float:
    """Fixed gate, relaxed to the truncation bound at low degrees.

    The regular expansion converges on the plane like ``rho^(L+1)`` with
    ``rho = max |r| / (2 |z_I|)``.
    """
    ratio = float(np.max(np.linalg.norm(points, axis=-1))) / (2.0 * abs(z))
    bound = BOUNDARY_HEADROOM * ratio ** (l_max + 1)
    return max(PEC_BOUNDARY_TOLERANCE, bound)


def _transform_identity(scene: _Scene, seed: int) -> CheckResult:
    points = shell_points(SAMPLE_POINTS, scene.k, 1.0, 2.0, seed)
    residuals = {
        n.label: check_transform_identity(n, scene.k, points)
        for n in SvwfBasis.canonical(2).indices
    }
    residual = max(residuals.values())
    return CheckResult(
        "transform_identity",
        None,
        residual,
        TRANSFORM_TOLERANCE,
        residual <= TRANSFORM_TOLERANCE,
        residuals,
    )


def _pec_image(scene: _Scene, l_max: int, seed: int) -> CheckResult:
    stack = NAMED_STACKS["pec_far"]
    w = scene.assemble(SvwfBasis.canonical(l_max), stack, scene.contour(l_max))
    points = shell_points(SAMPLE_POINTS, scene.k, 1.0, 2.0, seed)
    residual = check_pec_image(stack.z_interface, scene.k, w, points)
    return CheckResult(
        "pec_image",
        l_max,
        residual,
        PEC_IMAGE_TOLERANCE,
        residual <= PEC_IMAGE_TOLERANCE,
        {"z_interface": stack.z_interface},
    )


def _pec_boundary(
    scene: _Scene, l_max: int, orientation: ContourOrientation
) -> tuple[float, float, dict[str, float]]:
    z_interface, contour = _near_setup(scene, l_max, orientation)
    basis = SvwfBasis.canonical(l_max)
    stack = LayerStack(
        z_interface=z_interface, termination=NAMED_STACKS["pec_far"].termination
    )
    w = scene.assemble(basis, stack, contour)
    points = plane_grid(
        z_interface, NEAR_LATERAL_FRACTION * abs(z_interface), 5
    )
    residual = check_pec_boundary(basis, z_interface, scene.k, w, points)
    tolerance = _boundary_tolerance(points, z_interface, l_max)
    details = {"z_interface": z_interface, "kappa": contour.kappa}
    return residual, tolerance, details


def _pec_boundary_check(scene: _Scene, l_max: int) -> CheckResult:
    residual, tolerance, details = _pec_boundary(
        scene, l_max, ContourOrientation.STANDARD
    )
    return CheckResult(
        "pec_boundary",
        l_max,
        residual,
        tolerance,
        residual <= tolerance,
        details,
    )


def _orientation_control(scene: _Scene, l_max: int) -> CheckResult:
    residual, _, details = _pec_boundary(
        scene, l_max, ContourOrientation.FLIPPED_EVANESCENT
    )
    return CheckResult(
        "orientation_control",
        l_max,
        residual,
        ORIENTATION_CONTROL_FLOOR,
        residual >= ORIENTATION_CONTROL_FLOOR,
        details,
    )


def _reflected_field(scene: _Scene, l_max: int, seed: int) -> CheckResult:
    stack = LayerStack(z_interface=-0.2, termination=Layer(eps_r=4.0))
    basis = SvwfBasis.canonical(l_max)
    contour = scene.contour(l_max)
    w = scene.assemble(basis, stack, contour)
    points = shell_points(SAMPLE_POINTS, scene.k, 1.0, 2.0, seed)
    sources = (
        SvwfIndex(Polarization.TE, Parity.EVEN, 1, 1),
        SvwfIndex(Polarization.TM, Parity.EVEN, 0, 1),
    )
    residuals = {
        n.label: check_reflected_field(
            n, stack, scene.k, scene.omega, points, basis, contour, w
        )
        for n in sources
    }
    residual = max(residuals.values())
    return CheckResult(
        "reflected_field",
        l_max,
        residual,
        REFLECTED_FIELD_TOLERANCE,
        residual <= REFLECTED_FIELD_TOLERANCE,
        residuals,
    )


def _w_symmetry(scene: _Scene, l_max: int) -> CheckResult:
    w = scene.assemble(
        SvwfBasis.canonical(l_max),
        NAMED_STACKS["seawater"],
        scene.contour(l_max),
        mirror=False,
    )
    scale = max(float(np.max(np.abs(block))) for block in w.blocks.values())
    gap = max(
        float(np.max(np.abs(block - block.T))) for block in w.blocks.values()
    )
    residual = gap / scale if scale > 0 else gap
    return CheckResult(
        "w_symmetry",
        l_max,
        residual,
        SYMMETRY_TOLERANCE,
        residual <= SYMMETRY_TOLERANCE,
    )


def _vacuum(scene: _Scene, l_max: int) -> CheckResult:
    w = scene.assemble(
        SvwfBasis.canonical(l_max), NAMED_STACKS["vacuum"], scene.contour(l_max)
    )
    residual = max(float(np.max(np.abs(block))) for block in w.blocks.values())
    return CheckResult("vacuum", l_max, residual, 0.0, residual == 0.0)


def _reflection_order(scene: _Scene, l_max: int, seed: int) -> CheckResult:
    basis = SvwfBasis.canonical(l_max)
    w = scene.assemble(basis, NAMED_STACKS["pec_far"], scene.contour(l_max))
    spec = SyntheticGsmSpec(
        kind=SyntheticKind.RANDOM_PASSIVE, seed=seed, port_labels=HORN_PORTS
    )
    gsm = synthesize_gsm(spec, basis, scene.frequency, w=w)
    study = reflection_order_study(gsm, w, range(1, ORDER_STUDY_MAX + 1))
    loop_norm = float(np.linalg.norm(feedback_operator(gsm, w), 2))
    w_norm = max(float(np.linalg.norm(b, 2)) for b in w.blocks.values())
    # Tail of the series after ORDER_STUDY_MAX terms, in the 2-norm.
    bound = (
        0.5
        * float(np.linalg.norm(gsm.r_block, 2))
        * w_norm
        * float(np.linalg.norm(gsm.t_block, 2))
        * loop_norm**ORDER_STUDY_MAX
        / (1.0 - loop_norm)
        if loop_norm < 1.0
        else math.inf
    )
    residual = study.max_abs_deviation[ORDER_STUDY_MAX]
    details = {
        f"order_{order}_db": study.max_db_deviation[order]
        for order in study.orders
    }
    details["loop_norm"] = loop_norm
    return CheckResult(
        "reflection_order",
        l_max,
        residual,
        bound,
        residual <= bound * (1.0 + 1e-9) + 1e-15,
        details,
    )


def _truncated(gsm: GsmBlocks, l_max: int) -> GsmBlocks:
    """Restriction of a canonically ordered GSM to degrees up to ``l_max``."""
    basis = SvwfBasis.canonical(l_max)
    keep = slice(0, basis.size)
    return GsmBlocks(
        gamma=gsm.gamma,
        r_block=gsm.r_block[:, keep],
        t_block=gsm.t_block[keep, :],
        s_block=gsm.s_block[keep, keep],
        frequency=gsm.frequency,
        basis=basis,
        port_labels=gsm.port_labels,
    )


def _tapered(gsm: GsmBlocks, kr: float) -> GsmBlocks:
    """Damp coupling to degrees above ``kR`` like a physical antenna."""
    degrees = np.asarray([n.l for n in gsm.basis.indices], dtype=np.float64)
    weights = np.exp(-np.maximum(degrees - kr, 0.0))
    identity = np.eye(gsm.basis.size, dtype=np.complex128)
    offset = (gsm.s_block - identity) * np.outer(weights, weights)
    return GsmBlocks(
        gamma=gsm.gamma,
        r_block=gsm.r_block * weights[None, :],
        t_block=gsm.t_block * weights[:, None],
        s_block=identity + offset,
        frequency=gsm.frequency,
        basis=gsm.basis,
        port_labels=gsm.port_labels,
    )


def _composite_or_none(gsm: GsmBlocks, w: WMatrix) -> ComplexArray | None:
    try:
        return gamma_composite(gsm, w)
    except IllConditionedError as err:
        logger.warning(
            "Error map entry at l_max=%d skipped: %s", w.basis.l_max, err
        )
        return None


def error_map(
    scenario: str,
    selection: ValidationSelection,
) -> ErrorMap:
    """Composite error over ``(l_max, kappa)`` for a named PEC scenario."""
    scene = _Scene(selection.frequency)
    stack = NAMED_STACKS[scenario]
    reference_l = max(selection.map_l_values) + 4
    reference_kappa = max(selection.map_kappa_values)
    spec = SyntheticGsmSpec(
        kind=SyntheticKind.RANDOM_PASSIVE,
        seed=selection.seed,
        port_labels=HORN_PORTS,
    )
    reference_w = scene.assemble(
        SvwfBasis.canonical(reference_l),
        stack,
        ContourSpec(kappa=reference_kappa).doubled(),
    )
    # The loop contracts against reference_w; taper and truncation only
    # shrink the scattering offset.
    full = _tapered(
        synthesize_gsm(
            spec, reference_w.basis, selection.frequency, w=reference_w
        ),
        scene.k * HORN_R_MIN,
    )
    reference = _composite_or_none(full, reference_w)

    rows: list[tuple[float, ...]] = []
    for l_max in selection.map_l_values:
        gsm = _truncated(full, l_max)
        row: list[float] = []
        for kappa in selection.map_kappa_values:
            w = scene.assemble(gsm.basis, stack, ContourSpec(kappa=kappa))
            composite = _composite_or_none(gsm, w)
            if composite is None or reference is None:
                row.append(math.nan)
                continue
            row.append(float(np.max(np.abs(composite - reference))))
        logger.debug("Error map %s l_max=%d: %s", scenario, l_max, row)
        rows.append(tuple(row))
    return ErrorMap(
        scenario,
        stack.z_interface,
        tuple(selection.map_l_values),
        tuple(selection.map_kappa_values),
        tuple(rows),
        reference_l,
        reference_kappa,
    )


def _jobs(
    selection: ValidationSelection, scene: _Scene
) -> list[Callable[[], CheckResult]]:
    seed = selection.seed
    per_degree: dict[str, Callable[[int], CheckResult]] = {
        "pec_image": lambda l_max: _pec_image(scene, l_max, seed),
        "pec_boundary": lambda l_max: _pec_boundary_check(scene, l_max),
        "orientation_control": lambda l_max: _orientation_control(
            scene, l_max
        ),
        "reflected_field": lambda l_max: _reflected_field(scene, l_max, seed),
        "w_symmetry": lambda l_max: _w_symmetry(scene, l_max),
        "vacuum": lambda l_max: _vacuum(scene, l_max),
        "reflection_order": lambda l_max: _reflection_order(
            scene, l_max, seed
        ),
    }
    jobs: list[Callable[[], CheckResult]] = []
    for name in CHECKS:
        if name not in selection.checks:
            continue
        if name == "transform_identity":
            jobs.append(partial(_transform_identity, scene, seed))
            continue
        jobs.extend(
            partial(per_degree[name], l_max)
            for l_max in selection.l_max_values
        )
    return jobs


def run_validate(
    selection: ValidationSelection | None = None,
) -> ValidationReport:
    """Run the selected checks and, on request, the error maps.

    Failures are report entries, never exceptions.
    """
    chosen = selection or ValidationSelection()
    scene = _Scene(chosen.frequency)
    jobs = _jobs(chosen, scene)
    logger.info("Running %d validation check(s)", len(jobs))
    pool: WorkerPool[Callable[[], CheckResult], CheckResult] = WorkerPool(
        lambda job: job(), num_workers=chosen.num_workers
    )
    checks = tuple(pool.run(jobs))
    maps: tuple[ErrorMap, ...] = ()
    if chosen.error_maps:
        maps = tuple(
            error_map(scenario, chosen) for scenario in ("pec_far", "pec_near")
        )
    report = ValidationReport(checks, maps)
    for check in report.failures:
        logger.warning(
            "Check %s (l_max=%s) failed: residual %.3e, tolerance %.3e",
            check.name,
            check.l_max,
            check.residual,
            check.tolerance,
        )
    return report
