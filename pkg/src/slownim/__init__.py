"""Exact slow NIM toolkit: solver, M-rule audit, and exception families."""

from .errors import (
    CorruptTableError,
    IllegalMoveError,
    InvalidPositionError,
    InvalidSpecError,
    NoMovesError,
    NotAnExceptionError,
    OutOfBoxError,
    ResourceLimitError,
    SlowNimError,
    UnknownFamilyError,
    UnsupportedSpecError,
)
from .exceptions import (
    PROPERTY_NAMES,
    ExceptionRecord,
    PropertyReport,
    PropertyResult,
    check_properties,
    diagnose,
    is_exception,
    minimal_core,
    scan_box,
    verify_monotone_extension,
    write_jsonl,
)
from .families import (
    CoverageReport,
    Family,
    FamilyReport,
    applicable_boxes,
    catalog,
    coverage_report,
    family_by_id,
    generate_members,
    membership,
    predicted_keep,
    predicted_remoteness,
    tag_records,
    verify_family,
)
from .game import (
    GameSpec,
    MoveChoice,
    Position,
    Version,
    apply_keep,
    apply_reduce,
    box_size,
    canonicalize,
    decode,
    enumerate_box,
    is_terminal,
    rank,
    successors,
)
from .mrule import MRuleOutcome, m_move, m_sequence, round_up_even, round_up_odd
from .plots import plot_coverage, plot_scan, plot_verify
from .solver import (
    SolveRecord,
    SolveTable,
    Winner,
    build_table,
    cached_table,
    clear_memos,
    export_csv,
    export_jsonl,
    load_table,
    optimal_keep_indices,
    optimal_moves,
    remoteness,
    save_table,
    sg_value,
    solve,
    winner,
)

__version__ = "0.1.0"

__all__ = [
    "CorruptTableError",
    "CoverageReport",
    "ExceptionRecord",
    "Family",
    "FamilyReport",
    "GameSpec",
    "IllegalMoveError",
    "InvalidPositionError",
    "InvalidSpecError",
    "MRuleOutcome",
    "MoveChoice",
    "NoMovesError",
    "NotAnExceptionError",
    "OutOfBoxError",
    "PROPERTY_NAMES",
    "Position",
    "PropertyReport",
    "PropertyResult",
    "ResourceLimitError",
    "SlowNimError",
    "SolveRecord",
    "SolveTable",
    "UnknownFamilyError",
    "UnsupportedSpecError",
    "Version",
    "Winner",
    "applicable_boxes",
    "apply_keep",
    "apply_reduce",
    "box_size",
    "build_table",
    "cached_table",
    "canonicalize",
    "catalog",
    "check_properties",
    "clear_memos",
    "coverage_report",
    "decode",
    "diagnose",
    "enumerate_box",
    "export_csv",
    "export_jsonl",
    "family_by_id",
    "generate_members",
    "is_exception",
    "is_terminal",
    "load_table",
    "m_move",
    "m_sequence",
    "membership",
    "minimal_core",
    "optimal_keep_indices",
    "optimal_moves",
    "plot_coverage",
    "plot_scan",
    "plot_verify",
    "predicted_keep",
    "predicted_remoteness",
    "rank",
    "remoteness",
    "round_up_even",
    "round_up_odd",
    "save_table",
    "scan_box",
    "sg_value",
    "solve",
    "successors",
    "tag_records",
    "verify_family",
    "verify_monotone_extension",
    "winner",
    "write_jsonl",
]
