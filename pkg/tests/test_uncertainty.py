import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcburden import UncertaintySpec, simulate
from lcburden.uncertainty import Z95, draw_factors, iteration_rng, summarize


def test_spec_defaults(bundle):
    spec = UncertaintySpec.for_bundle(bundle)
    assert spec.mi_mean == 10729 / 12110
    assert spec.deaths_sd == pytest.approx(0.13 / 1.96)
    assert spec.cost_sd == pytest.approx(0.25 / 1.96)
    assert spec.mi_sd == pytest.approx(0.06 / 1.96)
    assert Z95 == 1.96


def test_spec_rejects_bad_values():
    with pytest.raises(ValueError):
        UncertaintySpec(mi_mean=0.9, cost_sd=-0.1)
    with pytest.raises(ValueError):
        UncertaintySpec(mi_mean=0.0)


def test_iteration_streams_are_independent_of_order():
    a = [iteration_rng(7, i).normal() for i in range(5)]
    b = [iteration_rng(7, i).normal() for i in reversed(range(5))][::-1]
    assert a == b
    assert iteration_rng(7, 0).normal() != iteration_rng(8, 0).normal()


def test_draws_are_positive():
    spec = UncertaintySpec(mi_mean=0.1, deaths_sd=2.0, cost_sd=2.0, mi_sd=2.0)
    for i in range(200):
        f = draw_factors(spec, iteration_rng(1, i))
        assert f.deaths > 0 and f.cost > 0 and f.mi > 0


def test_summarize_by_hand():
    s = summarize([1.0, 2.0, 3.0, 4.0], (25, 75))
    assert s.mean == 2.5
    assert (s.lower, s.upper) == (1.75, 3.25)
    assert s.sd == pytest.approx(np.std([1, 2, 3, 4], ddof=1))
    with pytest.raises(ValueError):
        summarize([])


@pytest.mark.property
@settings(max_examples=200, deadline=None)
@given(value=st.floats(-1e12, 1e12), n=st.integers(1, 500))
def test_constant_draws_collapse(value, n):
    s = summarize([value] * n)
    assert (s.mean, s.lower, s.upper, s.sd) == (value, value, value, 0.0)


def test_small_run_is_reproducible(bundle):
    a = simulate(bundle, 40, 3)
    b = simulate(bundle, 40, 3, workers=3)
    assert a.cells == b.cells
    c = simulate(bundle, 40, 4)
    assert c.cells != a.cells


def test_zero_variance_collapses(bundle):
    spec = UncertaintySpec.for_bundle(bundle).zero_variance()
    summary = simulate(bundle, 25, 1, spec=spec)
    for metric, interval in summary.cells.items():
        value = summary.deterministic[metric]
        assert (interval.mean, interval.lower, interval.upper) == (value, value, value), metric
        assert interval.sd == 0.0


def test_cost_cells_share_one_relative_width(bundle):
    summary = simulate(bundle, 300, 11)
    widths = []
    for (row, column), c in summary.cells.items():
        if column == "cost_total" and not row.startswith(("health", "total")) \
                and "death" not in row and "subtotal" not in row:
            det = summary.deterministic[(row, column)]
            widths.append((c.upper - c.lower) / det)
    # cost cells all move with the same factors, so their widths match
    assert max(widths) - min(widths) < 1e-9


def test_case_interval_width(bundle):
    summary = simulate(bundle, 2000, 5)
    c = summary.cells[("incident/NSCLC/I", "cases_total")]
    det = summary.deterministic[("incident/NSCLC/I", "cases_total")]
    half = (c.upper - c.lower) / 2 / det
    assert half == pytest.approx(math.hypot(0.13, 0.06 / 0.8859), abs=0.01)


def test_argument_checks(bundle):
    with pytest.raises(ValueError):
        simulate(bundle, 0)
    with pytest.raises(ValueError):
        simulate(bundle, 5, percentiles=(97.5, 2.5))
