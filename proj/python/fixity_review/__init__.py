"""Integrity engine for data-journal peer review.

Python surface over the C++ core: SHA-256 manifests, ZIP content
normalization, simulated repositories with fault injection, scripted
review scenarios, and report verification.
"""

from ._core import (
    DatasetRef,
    EngineError,
    SimulatedRepo,
    SteppingClock,
    build_manifest,
    build_zip,
    check_repo_requirements,
    digest_bytes,
    normalize_archive,
    probe_stability,
    run_scenario,
    table_categories,
    verify_report,
    verify_report_against,
)

__all__ = [
    "DatasetRef",
    "EngineError",
    "SimulatedRepo",
    "SteppingClock",
    "build_manifest",
    "build_zip",
    "check_repo_requirements",
    "digest_bytes",
    "normalize_archive",
    "probe_stability",
    "run_scenario",
    "table_categories",
    "verify_report",
    "verify_report_against",
]

__version__ = "1.0.0"
