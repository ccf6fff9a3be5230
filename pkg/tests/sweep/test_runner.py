"""Tests for forward sweeps and inverse fits."""

import logging
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from layered_gsm.files.cache import WMatrixCache
from layered_gsm.files.config import (
    FitConfig,
    FitMethod,
    FreeParameter,
    GsmSource,
    OutputFormat,
    SweepConfig,
    SyntheticSource,
    apply_parameter,
)
from layered_gsm.files.gsmio import SyntheticGsmSpec, SyntheticKind
from layered_gsm.solver.exceptions import (
    FrequencyNotFoundError,
    ValidationError,
)
from layered_gsm.solver.models import Layer, LayerStack, Termination
from layered_gsm.solver.options import ComputeOptions
from layered_gsm.sweep.runner import (
    ForwardModel,
    run_fit,
    run_sweep,
    write_sweep,
)

FREQUENCIES = (3.4e9, 3.6e9)
SOURCE = GsmSource(
    synthetic=SyntheticSource(
        spec=SyntheticGsmSpec(
            kind=SyntheticKind.DIAGONAL_SCATTERER,
            scattering={(1, 1): 0.6, (2, 1): 0.6},
            port_reflection=0.05,
        ),
        l_max=3,
        r_min=0.05,
        frequencies=FREQUENCIES,
    )
)
GROUND = LayerStack(-0.2, termination=Layer(eps_r=4.0, sigma=0.01))
FIT_TOLERANCE = 0.01


def sweep_config(stack: LayerStack, **changes: object) -> SweepConfig:
    """Sweep over both frequencies on two workers."""
    config = SweepConfig(
        source=SOURCE, stack=stack, compute=ComputeOptions(num_workers=2)
    )
    return replace(config, **changes)


def test_vacuum_sweep_returns_free_space_response() -> None:
    """Test Gamma_c = Gamma at every point above vacuum."""
    result = run_sweep(sweep_config(LayerStack(-0.2)))
    assert len(result.points) == 2
    for point in result.points:
        assert np.array_equal(point.composite, np.array([[0.05 + 0j]]))


def test_cached_run_is_bit_identical() -> None:
    """Test that a warm cache reproduces the cold results exactly."""
    cache = WMatrixCache()
    cold = run_sweep(sweep_config(GROUND), cache=cache)
    warm = run_sweep(sweep_config(GROUND), cache=cache)
    assert cold.timing.assembled == 2
    assert warm.timing.assembled == 0
    assert warm.timing.cache_hits == 2
    for first, second in zip(cold.points, warm.points):
        assert np.array_equal(first.composite, second.composite)
        assert first.fingerprint == second.fingerprint
    assert "2 cache hit(s)" in warm.timing.summary()


def test_disk_cache_is_bit_identical(tmp_path: Path) -> None:
    """Test results served from compressed cache entries."""
    cold = run_sweep(sweep_config(GROUND), cache=WMatrixCache(tmp_path))
    warm = run_sweep(sweep_config(GROUND), cache=WMatrixCache(tmp_path))
    assert all(point.cache_hit for point in warm.points)
    for first, second in zip(cold.points, warm.points):
        assert np.array_equal(first.composite, second.composite)


def test_height_axis() -> None:
    """Test sweep order and distinct responses along z_interface."""
    config = sweep_config(GROUND, axes={"z_interface": (-0.25, -0.2)})
    result = run_sweep(config)
    assert result.axes == ("z_interface",)
    order = [
        (p.parameters["z_interface"], p.frequency) for p in result.points
    ]
    assert order == [
        (-0.25, 3.4e9),
        (-0.25, 3.6e9),
        (-0.2, 3.4e9),
        (-0.2, 3.6e9),
    ]
    assert [p.index for p in result.points] == [0, 1, 2, 3]
    assert not np.allclose(
        result.points[0].composite, result.points[2].composite
    )
    assert len({p.fingerprint for p in result.points}) == 4


def test_missing_frequency_fails_before_evaluation() -> None:
    """Test that unknown frequencies are rejected up front."""
    with pytest.raises(FrequencyNotFoundError, match="3.5e\\+09"):
        _ = run_sweep(sweep_config(GROUND, frequencies=(3.4e9, 3.5e9)))


def test_lossy_top_medium_is_rejected() -> None:
    """Test that the antenna must sit in a lossless medium."""
    stack = replace(GROUND, top=Layer(eps_r=2.0, sigma=0.1))
    model = ForwardModel(SOURCE.load())
    with pytest.raises(ValidationError, match="lossless"):
        _ = model.evaluate(stack, FREQUENCIES[0])


def test_degree_follows_the_gsm() -> None:
    """Test that the model ignores a conflicting degree override."""
    model = ForwardModel(SOURCE.load(), ComputeOptions(l_max=7))
    w, hit = model.interaction(GROUND, FREQUENCIES[1])
    assert w.basis.l_max == 3
    assert w.frequency == FREQUENCIES[1]
    assert not hit
    assert model.interaction(GROUND, FREQUENCIES[1])[1]


def test_write_sweep_formats(tmp_path: Path) -> None:
    """Test CSV and Touchstone output of a sweep."""
    result = run_sweep(sweep_config(GROUND))
    (csv_path,) = write_sweep(result, tmp_path / "out.csv")
    frame = pd.read_csv(csv_path)
    assert len(frame) == 2
    assert set(frame["port_i"]) == {"P1"}
    written = write_sweep(
        result, tmp_path / "out.s1p", OutputFormat.TOUCHSTONE
    )
    assert [p.name for p in written] == ["out.s1p"]


@pytest.fixture
def observed(tmp_path: Path) -> Path:
    """Observed table generated from GROUND."""
    path = tmp_path / "observed.csv"
    _ = write_sweep(run_sweep(sweep_config(GROUND)), path)
    return path


def test_fit_without_free_parameters(observed: Path) -> None:
    """Test a single misfit evaluation of the template stack."""
    result = run_fit(FitConfig(source=SOURCE, stack=GROUND, observed=observed))
    assert result.parameters == {}
    assert result.misfit == pytest.approx(0.0, abs=1e-20)
    assert result.evaluations == 1
    assert result.converged
    assert len(result.as_dict()["history"]) == 1


def test_fit_reports_budget_exhaustion(
    observed: Path, caplog: pytest.LogCaptureFixture
) -> None:
    """Test best-so-far parameters when the budget runs out."""
    config = FitConfig(
        source=SOURCE,
        stack=replace(GROUND, termination=Layer(eps_r=2.0, sigma=0.01)),
        observed=observed,
        parameters=(FreeParameter("termination.eps_r", 2.0, 1.0, 10.0),),
        max_evaluations=2,
    )
    with caplog.at_level(logging.WARNING, logger="layered_gsm.sweep.runner"):
        result = run_fit(config)
    assert not result.converged
    assert result.misfit == min(result.history)
    assert "did not converge" in caplog.text


def test_fit_rejects_unknown_ports(tmp_path: Path) -> None:
    """Test observed port names that the GSM does not have."""
    path = tmp_path / "observed.csv"
    pd.DataFrame(
        [[3.4e9, "TE10", "TE10", 0.1, 0.0]],
        columns=["frequency", "port_i", "port_j", "re", "im"],
    ).to_csv(path, index=False)
    with pytest.raises(ValidationError, match="not in the GSM ports"):
        _ = run_fit(FitConfig(source=SOURCE, stack=GROUND, observed=path))


@pytest.mark.slow
@pytest.mark.parametrize("method", list(FitMethod))
def test_fit_recovers_permittivity(observed: Path, method: FitMethod) -> None:
    """Test recovery of eps_r = 4 from a start of 2."""
    config = FitConfig(
        source=SOURCE,
        stack=replace(GROUND, termination=Layer(eps_r=2.0, sigma=0.01)),
        observed=observed,
        parameters=(FreeParameter("termination.eps_r", 2.0, 1.0, 10.0),),
        method=method,
        tolerance=1e-8,
    )
    result = run_fit(config)
    assert result.parameters["termination.eps_r"] == pytest.approx(
        4.0, rel=FIT_TOLERANCE
    )
    assert result.misfit < 1e-6


def test_pec_sweep_differs_from_vacuum() -> None:
    """Test that a conducting plane changes the response."""
    pec = run_sweep(
        sweep_config(LayerStack(-0.2, termination=Termination.PEC))
    )
    for point in pec.points:
        assert abs(point.composite[0, 0] - 0.05) > 1e-6


SLAB_FREQUENCIES = (3.2e9, 3.35e9, 3.5e9, 3.65e9, 3.8e9)
SLAB_SOURCE = GsmSource(
    synthetic=SyntheticSource(
        spec=SyntheticGsmSpec(
            kind=SyntheticKind.DIAGONAL_SCATTERER,
            scattering={(1, 1): 0.6, (2, 1): 0.6},
            port_reflection=0.05,
        ),
        l_max=3,
        r_min=0.05,
        frequencies=SLAB_FREQUENCIES,
    )
)
SLAB = LayerStack(
    -0.2,
    layers=(Layer(eps_r=4.0, sigma=0.01, thickness=0.03),),
    termination=Layer(eps_r=12.0, sigma=0.05),
)
SLAB_TOLERANCE = 0.02
EVALUATION_COUNT = 100
EVALUATION_BUDGET_SECONDS = 10.0


@pytest.mark.slow
def test_fit_recovers_slab_permittivity_and_thickness(tmp_path: Path) -> None:
    """Test the two-parameter slab fit from five-frequency data."""
    observed = tmp_path / "slab.csv"
    truth = replace(sweep_config(SLAB), source=SLAB_SOURCE)
    _ = write_sweep(run_sweep(truth), observed)
    config = FitConfig(
        source=SLAB_SOURCE,
        stack=SLAB,
        observed=observed,
        parameters=(
            FreeParameter("layers[0].eps_r", 3.6, 1.0, 10.0),
            FreeParameter("layers[0].thickness", 0.027, 0.01, 0.06),
        ),
        tolerance=1e-10,
    )
    result = run_fit(config)
    assert result.parameters["layers[0].eps_r"] == pytest.approx(
        4.0, rel=SLAB_TOLERANCE
    )
    assert result.parameters["layers[0].thickness"] == pytest.approx(
        0.03, rel=SLAB_TOLERANCE
    )


@pytest.mark.slow
def test_repeated_evaluations_fit_the_budget() -> None:
    """Test a hundred uncached forward evaluations of a slab."""
    model = ForwardModel(SLAB_SOURCE.load())
    stacks = [
        apply_parameter(SLAB, "layers[0].eps_r", eps_r)
        for eps_r in np.linspace(2.0, 6.0, EVALUATION_COUNT)
    ]
    start = time.perf_counter()
    for stack in stacks:
        _ = model.evaluate(stack, SLAB_FREQUENCIES[2])
    elapsed = time.perf_counter() - start
    assert model.assembled == EVALUATION_COUNT
    assert elapsed < EVALUATION_BUDGET_SECONDS
