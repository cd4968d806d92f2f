"""Planted clique detection and low-degree hardness certificates under query masks."""
from __future__ import annotations

__version__ = "0.1.0"

from ._accel import BACKEND
from .core import (CliqueIndicator, Mask, MaskedGraph, ProblemParams, RngStream, default_degree,
                   sample_clique, sample_null, sample_planted)
from .detector import (DetectionOutcome, RectMaskParams, RowLayout, ThresholdPolynomial,
                       baseline_degree_count, detect, detector_mask, f_stat, rect_mask, tau_poly,
                       truncated_rect_mask)
from .errors import (InvalidParametersError, MaskParseError, PlantedCliqueError, PreconditionError,
                     ResourceLimitError)
from .harness import (ExperimentConfig, SeparationReport, phase_sweep, random_mask, render_svg,
                      reports_to_csv, reports_to_json, run_experiment)
from .ldub import (CliquePairSample, HardnessCertificate, LdubValue, analytic_vertex_bound,
                   certify_hardness, ldub_exact, ldub_mc, phi_value)
from .mask_ops import ReductionTrace, donate, reduce_mask, restrict_mask, vertex_removal_step
from .maskio import load_mask, parse_mask, save_mask

__all__ = [
    "BACKEND", "CliqueIndicator", "CliquePairSample", "DetectionOutcome", "ExperimentConfig",
    "HardnessCertificate", "InvalidParametersError", "LdubValue", "Mask", "MaskParseError",
    "MaskedGraph", "PlantedCliqueError", "PreconditionError", "ProblemParams", "RectMaskParams",
    "ReductionTrace", "ResourceLimitError", "RngStream", "RowLayout", "SeparationReport",
    "ThresholdPolynomial", "analytic_vertex_bound", "baseline_degree_count", "certify_hardness",
    "default_degree", "detect", "detector_mask", "donate", "f_stat", "ldub_exact", "ldub_mc",
    "load_mask", "parse_mask", "phase_sweep", "phi_value", "random_mask", "rect_mask",
    "reduce_mask", "render_svg", "reports_to_csv", "reports_to_json", "restrict_mask",
    "run_experiment", "sample_clique", "sample_null", "sample_planted", "save_mask", "tau_poly",
    "truncated_rect_mask", "vertex_removal_step",
]
