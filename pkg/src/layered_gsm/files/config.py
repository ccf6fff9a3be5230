"""Declarative run configuration.

Quantities are plain numbers in SI units or strings with a unit suffix::

    {"frequencies": {"start": "3.2 GHz", "stop": "3.8 GHz", "num": 7},
     "stack": {"layers": [{"eps_r": 4, "thickness": "20 mm"}],
               "termination": "pec", "z_interface": "-200 mm"}}

Stacks may also be given by the name of a built-in scenario.
"""

import enum
import json
import logging
import re
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TypeVar, cast

import numpy as np

from layered_gsm.files.gsmio import (
    DEFAULT_EXCITED,
    GsmFile,
    SyntheticGsmSpec,
    SyntheticKind,
    horn_preset,
    read_gsm,
    synthesize_file,
)
from layered_gsm.solver.exceptions import SchemaError, ValidationError
from layered_gsm.solver.interaction import SolveMode, SolveOptions
from layered_gsm.solver.models import (
    ContourOrientation,
    Layer,
    LayerStack,
    Parity,
    Polarization,
    SvwfIndex,
    Termination,
)
from layered_gsm.solver.options import ComputeOptions

logger = logging.getLogger(__name__)

_T = TypeVar("_T")
_E = TypeVar("_E", bound=enum.Enum)

Document = Mapping[str, object]

_UNITS: dict[str, dict[str, float]] = {
    "frequency": {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6},
    "conductivity": {"s/m": 1.0, "ms/m": 1e-3},
    "number": {},
}
_QUANTITY = re.compile(
    r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/]*)\s*$"
)
_PARAMETER_KINDS = {
    "eps_r": "number",
    "sigma": "conductivity",
    "mu_r": "number",
    "thickness": "length",
}
_LAYER_PARAMETER = re.compile(r"^(top|termination|layers\[(\d+)\])\.(\w+)$")


class OutputFormat(enum.Enum):
    """Result file formats."""

    CSV = "csv"
    TOUCHSTONE = "touchstone"


class FitMethod(enum.Enum):
    """Optimizers available to the inverse fit."""

    NELDER_MEAD = "nelder_mead"
    GRID_THEN_REFINE = "grid_then_refine"


def parse_quantity(value: object, kind: str, path: str) -> float:
    """Convert a number or a ``"<value> <unit>"`` string to SI.

    Raises
    ------
        SchemaError: If the value is not finite or the unit is unknown.

    """
    if isinstance(value, bool):
        raise SchemaError(path, "expected a number")
    if isinstance(value, (int, float)):
        number = float(value)
    elif isinstance(value, str):
        match = _QUANTITY.match(value)
        if match is None:
            raise SchemaError(path, f"cannot parse quantity {value!r}")
        number = float(match.group(1))
        unit = match.group(2).lower()
        if unit:
            scale = _UNITS[kind].get(unit)
            if scale is None:
                raise SchemaError(path, f"unknown {kind} unit {unit!r}")
            number *= scale
    else:
        raise SchemaError(path, f"expected a quantity, got {value!r}")
    if not np.isfinite(number):
        raise SchemaError(path, "must be finite")
    return number


def parse_range(value: object, kind: str, path: str) -> tuple[float, ...]:
    """A scalar, a list, or a ``{"start", "stop", "num"}`` range."""
    if isinstance(value, list):
        items = cast("list[object]", value)
        if not items:
            raise SchemaError(path, "must not be empty")
        return tuple(
            parse_quantity(item, kind, f"{path}[{position}]")
            for position, item in enumerate(items)
        )
    if isinstance(value, dict):
        spec = cast("dict[str, object]", value)
        _check_keys(spec, {"start", "stop", "num"}, path)
        start = parse_quantity(_get(spec, "start", path), kind, f"{path}.start")
        stop = parse_quantity(_get(spec, "stop", path), kind, f"{path}.stop")
        num = _get(spec, "num", path)
        if isinstance(num, bool) or not isinstance(num, int) or num < 1:
            raise SchemaError(f"{path}.num", "expected a positive integer")
        return tuple(float(v) for v in np.linspace(start, stop, num))
    return (parse_quantity(value, kind, path),)


def _get(doc: Document, key: str, path: str) -> object:
    if key not in doc:
        raise SchemaError(f"{path}.{key}" if path else key, "missing")
    return doc[key]


def _mapping(value: object, path: str) -> dict[str, object]:
    if not isinstance(value, dict):
        raise SchemaError(path, "expected an object")
    return cast("dict[str, object]", value)


def _check_keys(doc: Document, allowed: set[str], path: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        where = f"{path}.{unknown[0]}" if path else unknown[0]
        raise SchemaError(where, "unknown key")


def _integer(value: object, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, "expected an integer")
    return value


def _choice(value: object, enum_type: type[_E], path: str) -> _E:
    try:
        return enum_type(value)
    except ValueError as e:
        allowed = ", ".join(str(member.value) for member in enum_type)
        raise SchemaError(path, f"expected one of: {allowed}") from e


def _wrap(path: str, build: Callable[[], _T]) -> _T:
    """Run ``build`` and report record validation errors at ``path``."""
    try:
        return build()
    except ValidationError as e:
        raise SchemaError(path, str(e)) from e


def parse_layer(doc: object, path: str, *, half_space: bool) -> Layer:
    """Layer from ``{"eps_r", "sigma", "mu_r", "thickness"}``."""
    spec = _mapping(doc, path)
    _check_keys(spec, set(_PARAMETER_KINDS), path)
    values = {
        name: parse_quantity(spec[name], kind, f"{path}.{name}")
        for name, kind in _PARAMETER_KINDS.items()
        if name in spec
    }
    thickness = values.get("thickness")
    if half_space and thickness is not None:
        raise SchemaError(f"{path}.thickness", "half-space takes no thickness")
    if not half_space and thickness is None:
        raise SchemaError(f"{path}.thickness", "missing")
    return _wrap(
        path,
        lambda: Layer(
            eps_r=values.get("eps_r", 1.0),
            sigma=values.get("sigma", 0.0),
            mu_r=values.get("mu_r", 1.0),
            thickness=thickness,
        ),
    )


FIVE_LAYER_STACK = LayerStack(
    z_interface=-0.2,
    layers=(
        Layer(eps_r=2.5, sigma=0.001, thickness=0.03),
        Layer(eps_r=4.0, sigma=0.005, thickness=0.05),
        Layer(eps_r=6.0, sigma=0.01, thickness=0.04),
        Layer(eps_r=3.2, sigma=0.002, thickness=0.06),
        Layer(eps_r=8.0, sigma=0.02, thickness=0.05),
    ),
    termination=Layer(eps_r=12.0, sigma=0.05),
)

NAMED_STACKS: dict[str, LayerStack] = {
    "pec_far": LayerStack(z_interface=-0.2, termination=Termination.PEC),
    "pec_near": LayerStack(z_interface=-0.1, termination=Termination.PEC),
    "seawater": LayerStack(
        z_interface=-0.2, termination=Layer(eps_r=81.0, sigma=10.0)
    ),
    "seawater_high_loss": LayerStack(
        z_interface=-0.2, termination=Layer(eps_r=81.0, sigma=500.0)
    ),
    "five_layer": FIVE_LAYER_STACK,
    "vacuum": LayerStack(z_interface=-0.2),
}


def parse_stack(doc: object, path: str = "stack") -> LayerStack:
    """Stack from a document or from the name of a built-in scenario."""
    if isinstance(doc, str):
        if doc not in NAMED_STACKS:
            names = ", ".join(sorted(NAMED_STACKS))
            raise SchemaError(path, f"unknown stack {doc!r} (known: {names})")
        return NAMED_STACKS[doc]
    spec = _mapping(doc, path)
    _check_keys(spec, {"top", "layers", "termination", "z_interface"}, path)
    z_interface = parse_quantity(
        _get(spec, "z_interface", path), "length", f"{path}.z_interface"
    )
    top = (
        parse_layer(spec["top"], f"{path}.top", half_space=True)
        if "top" in spec
        else Layer()
    )
    raw_layers = spec.get("layers", [])
    if not isinstance(raw_layers, list):
        raise SchemaError(f"{path}.layers", "expected a list")
    layers = tuple(
        parse_layer(item, f"{path}.layers[{position}]", half_space=False)
        for position, item in enumerate(cast("list[object]", raw_layers))
    )
    raw_termination = _get(spec, "termination", path)
    termination: Layer | Termination
    if isinstance(raw_termination, str):
        termination = _choice(
            raw_termination, Termination, f"{path}.termination"
        )
    else:
        termination = parse_layer(
            raw_termination, f"{path}.termination", half_space=True
        )
    return _wrap(
        path,
        lambda: LayerStack(
            z_interface=z_interface,
            layers=layers,
            termination=termination,
            top=top,
        ),
    )


def apply_parameter(stack: LayerStack, name: str, value: float) -> LayerStack:
    """Return ``stack`` with one parameter replaced.

    Names are ``z_interface`` or ``<medium>.<field>`` where the medium is
    ``top``, ``termination`` or ``layers[i]`` and the field one of
    ``eps_r``, ``sigma``, ``mu_r`` and ``thickness``.

    Raises
    ------
        ValidationError: If the name does not address a parameter of the
            stack or the value is out of range.

    """
    if name == "z_interface":
        return replace(stack, z_interface=value)
    match = _LAYER_PARAMETER.match(name)
    if match is None or match.group(3) not in _PARAMETER_KINDS:
        err = f"Unknown stack parameter {name!r}"
        raise ValidationError(err)
    medium, index, attribute = match.groups()
    if medium == "top":
        return replace(stack, top=replace(stack.top, **{attribute: value}))
    if medium == "termination":
        if not isinstance(stack.termination, Layer):
            err = f"{name}: the termination is an ideal conductor"
            raise ValidationError(err)
        return replace(
            stack,
            termination=replace(stack.termination, **{attribute: value}),
        )
    position = int(index)
    if position >= len(stack.layers):
        err = f"{name}: the stack has {len(stack.layers)} interior layer(s)"
        raise ValidationError(err)
    layers = list(stack.layers)
    layers[position] = replace(layers[position], **{attribute: value})
    return replace(stack, layers=tuple(layers))


def parameter_kind(name: str) -> str:
    """Unit family of a stack parameter name."""
    if name == "z_interface":
        return "length"
    match = _LAYER_PARAMETER.match(name)
    if match is None or match.group(3) not in _PARAMETER_KINDS:
        raise SchemaError(name, "unknown stack parameter")
    return _PARAMETER_KINDS[match.group(3)]


@dataclass(frozen=True)
class SyntheticSource:
    """GSM generated on the fly instead of read from a file."""

    spec: SyntheticGsmSpec
    l_max: int
    r_min: float
    frequencies: tuple[float, ...]
    preset: str | None = None

    def build(self) -> GsmFile:
        """Generate the GSM file."""
        if self.preset == "horn":
            return horn_preset(
                self.frequencies or None,
                seed=self.spec.seed,
                l_max=self.l_max or None,
            )
        return synthesize_file(
            self.spec, self.l_max, self.frequencies, r_min=self.r_min
        )


@dataclass(frozen=True)
class GsmSource:
    """Exactly one of a GSM file path or a synthetic generator."""

    path: Path | None = None
    synthetic: SyntheticSource | None = None

    def __post_init__(self) -> None:
        """Enforce that exactly one source is configured."""
        if (self.path is None) == (self.synthetic is None):
            err = "Exactly one of 'gsm' and 'synthetic' must be given"
            raise ValidationError(err)

    def load(self) -> GsmFile:
        """Read or generate the GSM file."""
        if self.path is not None:
            return read_gsm(self.path)
        assert self.synthetic is not None  # noqa: S101
        return self.synthetic.build()


@dataclass(frozen=True)
class SweepConfig:
    """One forward sweep.

    Attributes
    ----------
        source: Where the antenna GSM comes from.
        stack: Template stack the axes are applied to.
        frequencies: Frequencies to evaluate; all file frequencies if empty.
        axes: Stack parameter name to the values it takes. The sweep runs
            over the Cartesian product of all axes and frequencies.
        compute: Truncation, quadrature and caching options.
        solve: Feedback solve options.
        output: Result path, or None to skip writing.
        output_format: Format of the result file.

    """

    source: GsmSource
    stack: LayerStack
    frequencies: tuple[float, ...] = ()
    axes: dict[str, tuple[float, ...]] = field(default_factory=dict)
    compute: ComputeOptions = field(default_factory=ComputeOptions)
    solve: SolveOptions = field(default_factory=SolveOptions)
    output: Path | None = None
    output_format: OutputFormat = OutputFormat.CSV

    def __post_init__(self) -> None:
        """Check that every axis is non-empty and applicable."""
        for name, values in self.axes.items():
            if not values:
                err = f"Sweep axis {name!r} is empty"
                raise ValidationError(err)
            if not all(np.isfinite(values)):
                err = f"Sweep axis {name!r} has non-finite values"
                raise ValidationError(err)
            apply_parameter(self.stack, name, values[0])


@dataclass(frozen=True)
class FreeParameter:
    """Stack parameter adjusted by the fit, with its start and bounds."""

    name: str
    start: float
    lower: float
    upper: float

    def __post_init__(self) -> None:
        """Check the bounds are ordered around the start value."""
        if not self.lower < self.upper:
            err = f"{self.name}: bounds must satisfy lower < upper"
            raise ValidationError(err)
        if not self.lower <= self.start <= self.upper:
            err = f"{self.name}: start must lie within the bounds"
            raise ValidationError(err)


@dataclass(frozen=True)
class FitConfig:
    """Inverse fit of stack parameters to observed composite responses.

    Attributes
    ----------
        source: Where the antenna GSM comes from.
        stack: Template stack the free parameters are applied to.
        observed: CSV result table with the observed responses.
        parameters: Free parameters; may be empty to only evaluate the
            misfit.
        method: Optimizer.
        max_evaluations: Budget of forward evaluations.
        tolerance: Convergence tolerance on parameters and misfit.
        grid_points: Points per parameter of the initial grid for
            ``GRID_THEN_REFINE``.
        compute: Truncation, quadrature and caching options.
        solve: Feedback solve options.
        output: Path of the fit report, or None.

    """

    source: GsmSource
    stack: LayerStack
    observed: Path
    parameters: tuple[FreeParameter, ...] = ()
    method: FitMethod = FitMethod.NELDER_MEAD
    max_evaluations: int = 400
    tolerance: float = 1e-6
    grid_points: int = 9
    compute: ComputeOptions = field(default_factory=ComputeOptions)
    solve: SolveOptions = field(default_factory=SolveOptions)
    output: Path | None = None

    def __post_init__(self) -> None:
        """Check parameter names against the stack and the budgets."""
        for parameter in self.parameters:
            apply_parameter(self.stack, parameter.name, parameter.start)
        if self.max_evaluations < 1:
            err = "max_evaluations must be at least 1"
            raise ValidationError(err)
        if self.grid_points < 2:
            err = "grid_points must be at least 2"
            raise ValidationError(err)


def _parse_excited(doc: object, path: str) -> SvwfIndex:
    spec = _mapping(doc, path)
    _check_keys(spec, {"tau", "sigma", "m", "l"}, path)
    values = {
        key: _integer(_get(spec, key, path), f"{path}.{key}")
        for key in ("tau", "sigma", "m", "l")
    }
    tau = _choice(values["tau"], Polarization, f"{path}.tau")
    sigma = _choice(values["sigma"], Parity, f"{path}.sigma")
    return _wrap(
        path, lambda: SvwfIndex(tau, sigma, values["m"], values["l"])
    )


def parse_synthetic(doc: object, path: str = "synthetic") -> SyntheticSource:
    """Synthetic GSM source from its document."""
    spec = _mapping(doc, path)
    _check_keys(
        spec,
        {
            "preset",
            "kind",
            "l_max",
            "r_min",
            "frequencies",
            "seed",
            "radius_bound",
            "interaction_norm",
            "ports",
            "excited",
            "amplitude",
            "port_reflection",
            "scattering",
        },
        path,
    )
    preset = spec.get("preset")
    if preset not in (None, "horn"):
        raise SchemaError(f"{path}.preset", "only 'horn' is available")
    frequencies = (
        parse_range(spec["frequencies"], "frequency", f"{path}.frequencies")
        if "frequencies" in spec
        else ()
    )
    if preset is None and not frequencies:
        raise SchemaError(f"{path}.frequencies", "missing")
    l_max = _integer(spec.get("l_max", 0), f"{path}.l_max")
    if preset is None and l_max < 1:
        raise SchemaError(f"{path}.l_max", "expected a positive integer")
    r_min = parse_quantity(spec.get("r_min", 0.1), "length", f"{path}.r_min")

    scattering: dict[tuple[int, int], complex] = {}
    raw_scattering = spec.get("scattering", [])
    if not isinstance(raw_scattering, list):
        raise SchemaError(f"{path}.scattering", "expected a list")
    for position, item in enumerate(cast("list[object]", raw_scattering)):
        where = f"{path}.scattering[{position}]"
        entry = _mapping(item, where)
        _check_keys(entry, {"tau", "l", "re", "im"}, where)
        key = (
            _integer(_get(entry, "tau", where), f"{where}.tau"),
            _integer(_get(entry, "l", where), f"{where}.l"),
        )
        scattering[key] = complex(
            parse_quantity(entry.get("re", 1.0), "number", f"{where}.re"),
            parse_quantity(entry.get("im", 0.0), "number", f"{where}.im"),
        )

    ports = spec.get("ports", ["P1"])
    if not isinstance(ports, list) or not all(
        isinstance(p, str) for p in cast("list[object]", ports)
    ):
        raise SchemaError(f"{path}.ports", "expected a list of names")
    kind = _choice(
        spec.get("kind", SyntheticKind.RANDOM_PASSIVE.value)
        if preset
        else _get(spec, "kind", path),
        SyntheticKind,
        f"{path}.kind",
    )

    def build_spec() -> SyntheticGsmSpec:
        return SyntheticGsmSpec(
            kind=kind,
            excited=_parse_excited(spec["excited"], f"{path}.excited")
            if "excited" in spec
            else DEFAULT_EXCITED,
            amplitude=parse_quantity(
                spec.get("amplitude", 1.0), "number", f"{path}.amplitude"
            ),
            port_reflection=parse_quantity(
                spec.get("port_reflection", 0.0),
                "number",
                f"{path}.port_reflection",
            ),
            scattering=scattering,
            seed=_integer(spec.get("seed", 0), f"{path}.seed"),
            radius_bound=parse_quantity(
                spec.get("radius_bound", 0.5), "number", f"{path}.radius_bound"
            ),
            interaction_norm=parse_quantity(
                spec.get("interaction_norm", 1.0),
                "number",
                f"{path}.interaction_norm",
            ),
            port_labels=tuple(cast("list[str]", ports)),
        )

    return SyntheticSource(
        spec=_wrap(path, build_spec),
        l_max=l_max,
        r_min=r_min,
        frequencies=frequencies,
        preset="horn" if preset else None,
    )


def parse_compute(doc: object, path: str = "contour") -> ComputeOptions:
    """Truncation and quadrature overrides."""
    spec = _mapping(doc, path)
    _check_keys(
        spec,
        {
            "l_max",
            "kappa",
            "iota",
            "quad_order_evanescent",
            "quad_order_propagating",
            "orientation",
        },
        path,
    )
    options = ComputeOptions()
    if "l_max" in spec:
        options.l_max = _integer(spec["l_max"], f"{path}.l_max")
    if "kappa" in spec:
        options.kappa = parse_quantity(
            spec["kappa"], "number", f"{path}.kappa"
        )
    if "iota" in spec:
        options.iota = parse_quantity(spec["iota"], "number", f"{path}.iota")
    for key in ("quad_order_evanescent", "quad_order_propagating"):
        if key in spec:
            setattr(options, key, _integer(spec[key], f"{path}.{key}"))
    if "orientation" in spec:
        options.orientation = _choice(
            spec["orientation"], ContourOrientation, f"{path}.orientation"
        )
    return options


def parse_solve(doc: object, path: str = "solve") -> SolveOptions:
    """Feedback solve options."""
    spec = _mapping(doc, path)
    _check_keys(spec, {"mode", "order", "rcond_floor"}, path)
    mode = _choice(spec.get("mode", "direct"), SolveMode, f"{path}.mode")
    order = _integer(spec.get("order", 1), f"{path}.order")
    floor = parse_quantity(
        spec.get("rcond_floor", SolveOptions.rcond_floor),
        "number",
        f"{path}.rcond_floor",
    )
    return _wrap(path, lambda: SolveOptions(mode, order, floor))


def _parse_source(spec: Document, base: Path) -> GsmSource:
    has_path = "gsm" in spec
    has_synthetic = "synthetic" in spec
    if has_path == has_synthetic:
        raise SchemaError("gsm", "exactly one of 'gsm' and 'synthetic'")
    if has_path:
        raw = spec["gsm"]
        if not isinstance(raw, str):
            raise SchemaError("gsm", "expected a path")
        return GsmSource(path=base / raw)
    return GsmSource(synthetic=parse_synthetic(spec["synthetic"]))


def _parse_axes(doc: object) -> dict[str, tuple[float, ...]]:
    spec = _mapping(doc, "axes")
    axes: dict[str, tuple[float, ...]] = {}
    for name, value in spec.items():
        try:
            kind = parameter_kind(name)
        except SchemaError as e:
            raise SchemaError(f"axes.{name}", "unknown stack parameter") from e
        axes[name] = parse_range(value, kind, f"axes.{name}")
    return axes


def sweep_config_from_dict(
    doc: object, base: Path | None = None
) -> SweepConfig:
    """Build a :class:`SweepConfig` from a parsed document.

    Relative paths are resolved against ``base``.
    """
    root = base or Path()
    spec = _mapping(doc, "config")
    _check_keys(
        spec,
        {
            "gsm",
            "synthetic",
            "stack",
            "frequencies",
            "axes",
            "contour",
            "solve",
            "output",
        },
        "",
    )
    output_path, output_format = _parse_output(spec.get("output"), root)
    source = _parse_source(spec, root)
    stack = parse_stack(_get(spec, "stack", ""))
    frequencies = (
        parse_range(spec["frequencies"], "frequency", "frequencies")
        if "frequencies" in spec
        else ()
    )
    axes = _parse_axes(spec.get("axes", {}))
    compute = parse_compute(spec.get("contour", {}))
    solve = parse_solve(spec.get("solve", {}))
    return _wrap(
        "axes",
        lambda: SweepConfig(
            source=source,
            stack=stack,
            frequencies=frequencies,
            axes=axes,
            compute=compute,
            solve=solve,
            output=output_path,
            output_format=output_format,
        ),
    )


def _parse_output(
    doc: object, base: Path
) -> tuple[Path | None, OutputFormat]:
    if doc is None:
        return None, OutputFormat.CSV
    spec = _mapping(doc, "output")
    _check_keys(spec, {"path", "format"}, "output")
    raw_path = spec.get("path")
    if raw_path is not None and not isinstance(raw_path, str):
        raise SchemaError("output.path", "expected a path")
    output_format = _choice(
        spec.get("format", "csv"), OutputFormat, "output.format"
    )
    return (base / raw_path if raw_path else None), output_format


def _parse_parameters(doc: object) -> tuple[FreeParameter, ...]:
    if not isinstance(doc, list):
        raise SchemaError("parameters", "expected a list")
    parameters: list[FreeParameter] = []
    for position, item in enumerate(cast("list[object]", doc)):
        where = f"parameters[{position}]"
        spec = _mapping(item, where)
        _check_keys(spec, {"name", "start", "lower", "upper"}, where)
        name = _get(spec, "name", where)
        if not isinstance(name, str):
            raise SchemaError(f"{where}.name", "expected a string")
        kind = parameter_kind(name)
        values = [
            parse_quantity(_get(spec, key, where), kind, f"{where}.{key}")
            for key in ("start", "lower", "upper")
        ]
        parameters.append(
            _wrap(where, lambda n=name, v=values: FreeParameter(n, *v))
        )
    return tuple(parameters)


def fit_config_from_dict(doc: object, base: Path | None = None) -> FitConfig:
    """Build a :class:`FitConfig` from a parsed document."""
    root = base or Path()
    spec = _mapping(doc, "config")
    _check_keys(
        spec,
        {
            "gsm",
            "synthetic",
            "stack",
            "observed",
            "parameters",
            "optimizer",
            "contour",
            "solve",
            "output",
        },
        "",
    )
    observed = _get(spec, "observed", "")
    if not isinstance(observed, str):
        raise SchemaError("observed", "expected a path")
    optimizer = _mapping(spec.get("optimizer", {}), "optimizer")
    _check_keys(
        optimizer,
        {"method", "max_evaluations", "tolerance", "grid_points"},
        "optimizer",
    )
    method = _choice(
        optimizer.get("method", FitMethod.NELDER_MEAD.value),
        FitMethod,
        "optimizer.method",
    )
    output_path, _ = _parse_output(spec.get("output"), root)
    source = _parse_source(spec, root)
    stack = parse_stack(_get(spec, "stack", ""))
    parameters = _parse_parameters(spec.get("parameters", []))
    max_evaluations = _integer(
        optimizer.get("max_evaluations", 400), "optimizer.max_evaluations"
    )
    tolerance = parse_quantity(
        optimizer.get("tolerance", 1e-6), "number", "optimizer.tolerance"
    )
    grid_points = _integer(
        optimizer.get("grid_points", 9), "optimizer.grid_points"
    )
    compute = parse_compute(spec.get("contour", {}))
    solve = parse_solve(spec.get("solve", {}))
    return _wrap(
        "parameters",
        lambda: FitConfig(
            source=source,
            stack=stack,
            observed=root / observed,
            parameters=parameters,
            method=method,
            max_evaluations=max_evaluations,
            tolerance=tolerance,
            grid_points=grid_points,
            compute=compute,
            solve=solve,
            output=output_path,
        ),
    )


def load_document(path: Path | str) -> dict[str, object]:
    """Read a JSON configuration document.

    Raises
    ------
        SchemaError: If the file is not a JSON object.

    """
    source = Path(path)
    try:
        doc = json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(str(source), f"not valid JSON ({e})") from e
    logger.debug("Loaded configuration %s", source)
    return _mapping(doc, str(source))


def load_sweep_config(path: Path | str) -> SweepConfig:
    """Read a sweep configuration; relative paths follow the file."""
    source = Path(path)
    return sweep_config_from_dict(load_document(source), source.parent)


def load_fit_config(path: Path | str) -> FitConfig:
    """Read a fit configuration; relative paths follow the file."""
    source = Path(path)
    return fit_config_from_dict(load_document(source), source.parent)


def stack_values(stack: LayerStack, names: Sequence[str]) -> dict[str, float]:
    """Current values of the named stack parameters."""
    values: dict[str, float] = {}
    for name in names:
        if name == "z_interface":
            values[name] = stack.z_interface
            continue
        match = _LAYER_PARAMETER.match(name)
        if match is None:
            err = f"Unknown stack parameter {name!r}"
            raise ValidationError(err)
        medium, index, attribute = match.groups()
        layer: object
        if medium == "top":
            layer = stack.top
        elif medium == "termination":
            layer = stack.termination
        else:
            layer = stack.layers[int(index)]
        value = getattr(layer, attribute, None)
        if value is None:
            err = f"{name} has no value in this stack"
            raise ValidationError(err)
        values[name] = float(value)
    return values
