"""Lung cancer disease and economic burden model.

Typical use::

    from lcburden import load_bundle, validate_bundle, run_model, simulate

    bundle = load_bundle("data/argentina-2023")
    result = run_model(bundle)
    result.report.total.weighted
"""

from lcburden.bundle import BundleError, ScenarioBundle, load_bundle, save_bundle
from lcburden.model import ModelResult, run_model
from lcburden.uncertainty import SimulationSummary, UncertaintySpec, simulate
from lcburden.validation import ValidationReport, validate_bundle

__all__ = [
    "BundleError",
    "ModelResult",
    "ScenarioBundle",
    "SimulationSummary",
    "UncertaintySpec",
    "ValidationReport",
    "load_bundle",
    "run_model",
    "save_bundle",
    "simulate",
    "validate_bundle",
]
