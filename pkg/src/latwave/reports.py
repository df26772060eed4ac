"""Result records for verified inequalities and blow-up campaigns.

A BoundReport captures one checked claim: the measured worst ratio against
the claimed envelope, where it occurred, and (for claims whose constant the
source leaves symbolic) the empirically fitted constant.  Claims that are
measurements rather than assertions carry asserted=False and always pass.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field


@dataclass
class BoundReport:
    claim: str
    parameters: dict = field(default_factory=dict)
    worst_ratio: float = 0.0
    worst_location: dict = field(default_factory=dict)
    passed: bool = True
    fitted_constant: float | None = None
    asserted: bool = True
    note: str = ""

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


@dataclass
class BlowupReport:
    E0: float
    t1: float
    I_t1: float
    Iprime_t1: float
    T_pred: float
    T_num: float | None
    virial_min_margin: float
    passed: bool

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


@dataclass
class ModifiedEnergyReport:
    Etilde0: float
    Etilde0_expected: float
    identity_ok: bool
    ts: list
    Etilde: list
    log_growth_over_t: list
    growth_constant: float
    l2_growth_constant: float
    passed: bool

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def _jsonable(obj):
    """Recursively coerce report contents to plain JSON types.

    Infinities become the string 'inf' so emitted documents stay strict JSON.
    """
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        if obj == float("inf"):
            return "inf"
        if obj == float("-inf"):
            return "-inf"
        return obj
    if hasattr(obj, "item"):  # numpy scalar
        return _jsonable(obj.item())
    return obj


def dump_json(doc, path):
    """Write any report-like structure as deterministic, sorted-key JSON."""
    with open(path, "w") as fh:
        json.dump(_jsonable(doc), fh, indent=2, sort_keys=True)
        fh.write("\n")


def dump_reports(reports, path):
    """Write a list of reports as deterministic, sorted-key JSON."""
    dump_json([r.to_dict() for r in reports], path)
