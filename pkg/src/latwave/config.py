"""Run-configuration documents: a versioned JSON schema, strictly validated.

A run is described by a single JSON document.  Validation is deliberately
unforgiving — unknown keys are rejected at every level, every random element
must carry an explicit seed, and the integrator must match the model — so
that a config that validates today replays bitwise-identically tomorrow.

Three document shapes live here: full runs (`parse_config`), linear-growth
sweeps (`parse_growth_sweep`) and kernel sweeps (`parse_kernel_sweep`).
Parsing only validates and normalizes; realizing fields from the `initial`
block is the experiment layer's job.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .lattice import INF, LatticeSpec
from .potentials import KINDS as POTENTIAL_KINDS
from .potentials import PotentialSpec

SCHEMA_VERSION = 1

MODELS = ("dnls", "dkg", "linear-schrodinger", "linear-kg")
INTEGRATORS = ("strang", "verlet", "picard")
COMPATIBLE = {
    "dnls": ("strang", "picard"),
    "linear-schrodinger": ("strang", "picard"),
    "dkg": ("verlet",),
    "linear-kg": ("verlet",),
}
SCHRODINGER_MODELS = ("dnls", "linear-schrodinger")
KG_MODELS = ("dkg", "linear-kg")

INITIAL_KINDS = ("delta", "gaussian", "random", "file", "negative_energy_seed")
VELOCITY_KINDS = ("zero", "delta", "gaussian", "random", "file")


class ConfigError(ValueError):
    """A configuration document failed validation."""


def _check_keys(doc: dict, allowed, where: str):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object, got {type(doc).__name__}")
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown} (allowed: {sorted(allowed)})")


def _get(doc: dict, key: str, where: str):
    if key not in doc:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return doc[key]


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {x!r}")
    return float(x)


def _positive(x, where: str) -> float:
    v = _number(x, where)
    if v <= 0:
        raise ConfigError(f"{where}: must be positive, got {v}")
    return v


def _integer(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{where}: expected an integer, got {x!r}")
    return x


def parse_lattice(doc, where: str = "lattice") -> LatticeSpec:
    _check_keys(doc, ("d", "N", "h"), where)
    try:
        return LatticeSpec(_integer(_get(doc, "d", where), f"{where}.d"),
                           _integer(_get(doc, "N", where), f"{where}.N"),
                           _positive(_get(doc, "h", where), f"{where}.h"))
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from e


_POTENTIAL_FIELDS = {
    "zero": (),
    "constant": ("c",),
    "periodic": ("pattern",),
    "iid_uniform": ("lo", "hi", "seed"),
    "quasiperiodic": ("amplitude", "phase", "frequency"),
}
_POTENTIAL_OPTIONAL = {"quasiperiodic": ("phase", "frequency")}


def parse_potential(doc, where: str = "params.potential") -> PotentialSpec:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = _get(doc, "kind", where)
    if kind not in POTENTIAL_KINDS:
        raise ConfigError(f"{where}.kind: unknown kind {kind!r} "
                          f"(one of {list(POTENTIAL_KINDS)})")
    fields = _POTENTIAL_FIELDS[kind]
    optional = _POTENTIAL_OPTIONAL.get(kind, ())
    _check_keys(doc, ("kind",) + fields, where)
    for key in fields:
        if key not in optional and key not in doc:
            raise ConfigError(f"{where}: kind {kind!r} requires {key!r}")
    kwargs = {}
    if kind == "constant":
        kwargs["c"] = _number(doc["c"], f"{where}.c")
    elif kind == "periodic":
        pat = doc["pattern"]
        if not isinstance(pat, list) or not pat:
            raise ConfigError(f"{where}.pattern: expected a nonempty array")
        kwargs["pattern"] = tuple(_number(x, f"{where}.pattern") for x in pat)
    elif kind == "iid_uniform":
        kwargs["lo"] = _number(doc["lo"], f"{where}.lo")
        kwargs["hi"] = _number(doc["hi"], f"{where}.hi")
        kwargs["seed"] = _integer(doc["seed"], f"{where}.seed")
    elif kind == "quasiperiodic":
        kwargs["amplitude"] = _number(doc["amplitude"], f"{where}.amplitude")
        for key in ("phase", "frequency"):
            if key in doc:
                arr = doc[key]
                if not isinstance(arr, list):
                    raise ConfigError(f"{where}.{key}: expected an array")
                kwargs[key] = tuple(_number(x, f"{where}.{key}") for x in arr)
    try:
        return PotentialSpec(kind, **kwargs)
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from e


def parse_p_list(raw, where: str) -> tuple:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{where}: expected a nonempty array")
    out = []
    for x in raw:
        if x == "inf":
            out.append(INF)
            continue
        p = _number(x, where)
        if p < 1:
            raise ConfigError(f"{where}: p must be >= 1 or \"inf\", got {p}")
        out.append(p)
    return tuple(out)


def p_label(p) -> str:
    """Stable text label for a p value ("inf", "2", "1.5")."""
    if p == INF:
        return "inf"
    return f"{p:g}"


_INITIAL_FIELDS = {
    "delta": ("amplitude",),
    "gaussian": ("width", "amplitude"),
    "random": ("seed", "amplitude"),
    "file": ("path",),
    "negative_energy_seed": (),
    "zero": (),
}


def _parse_initial_block(doc, kinds, where: str) -> dict:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = _get(doc, "kind", where)
    if kind not in kinds:
        raise ConfigError(f"{where}.kind: unknown kind {kind!r} (one of {list(kinds)})")
    fields = _INITIAL_FIELDS[kind]
    extra = ("velocity",) if where == "initial" else ()
    _check_keys(doc, ("kind",) + fields + extra, where)
    out = {"kind": kind}
    if "amplitude" in fields:
        out["amplitude"] = _number(_get(doc, "amplitude", where), f"{where}.amplitude")
    if kind == "gaussian":
        out["width"] = _positive(_get(doc, "width", where), f"{where}.width")
    if kind == "random":
        out["seed"] = _integer(_get(doc, "seed", where), f"{where}.seed")
    if kind == "file":
        path = _get(doc, "path", where)
        if not isinstance(path, str):
            raise ConfigError(f"{where}.path: expected a string")
        out["path"] = path
    return out


@dataclass(eq=False)
class RunConfig:
    """A validated full-run document, with constructed sub-objects."""

    model: str
    lattice: LatticeSpec
    sigma: float
    lam: int
    potential: PotentialSpec
    initial: dict
    velocity: dict | None
    integrator: str
    tau: float | None
    tol: float
    T: float
    p_list: tuple
    cadence: float | None
    echo: dict


def parse_config(doc: dict) -> RunConfig:
    _check_keys(doc, ("schema_version", "model", "lattice", "params",
                      "initial", "integrator", "T", "diagnostics"), "config")
    version = _get(doc, "schema_version", "config")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"config.schema_version: expected {SCHEMA_VERSION}, got {version!r}")

    model = _get(doc, "model", "config")
    if model not in MODELS:
        raise ConfigError(f"config.model: unknown model {model!r} (one of {list(MODELS)})")
    lattice = parse_lattice(_get(doc, "lattice", "config"))

    params = _get(doc, "params", "config")
    _check_keys(params, ("sigma", "lambda", "potential"), "params")
    sigma = _number(_get(params, "sigma", "params"), "params.sigma")
    lam = _get(params, "lambda", "params")
    if model in ("linear-schrodinger", "linear-kg"):
        if lam != 0:
            raise ConfigError(f"params.lambda: model {model!r} is linear; lambda must be 0")
    elif lam not in (-1, 1):
        raise ConfigError(f"params.lambda: expected -1 or 1, got {lam!r}")
    if sigma <= 0 and model == "dnls":
        raise ConfigError(f"params.sigma: must be positive, got {sigma}")
    if sigma < 0:
        raise ConfigError(f"params.sigma: must be nonnegative, got {sigma}")
    potential = parse_potential(_get(params, "potential", "params"))

    initial = _parse_initial_block(_get(doc, "initial", "config"), INITIAL_KINDS, "initial")
    velocity = None
    raw_initial = doc["initial"]
    if "velocity" in raw_initial:
        if model not in KG_MODELS:
            raise ConfigError("initial.velocity: only the second-order models take "
                              "initial velocity data")
        velocity = _parse_initial_block(raw_initial["velocity"], VELOCITY_KINDS,
                                        "initial.velocity")
    if initial["kind"] == "negative_energy_seed":
        if model != "dkg" or lam != -1:
            raise ConfigError("initial.kind negative_energy_seed requires model dkg "
                              "with lambda = -1")
        if velocity is not None:
            raise ConfigError("initial.velocity: negative_energy_seed fixes g = 0")

    integ = _get(doc, "integrator", "config")
    _check_keys(integ, ("kind", "tau", "tol"), "integrator")
    kind = _get(integ, "kind", "integrator")
    if kind not in INTEGRATORS:
        raise ConfigError(f"integrator.kind: unknown integrator {kind!r} "
                          f"(one of {list(INTEGRATORS)})")
    if kind not in COMPATIBLE[model]:
        raise ConfigError(f"integrator.kind: {kind!r} is incompatible with model "
                          f"{model!r} (use one of {list(COMPATIBLE[model])})")
    tau = None
    if kind == "picard":
        if "tau" in integ:
            raise ConfigError("integrator.tau: the integral-equation solver picks its "
                              "own windows; tau is not accepted")
    elif kind == "strang":
        tau = _positive(_get(integ, "tau", "integrator"), "integrator.tau")
    else:  # verlet: optional, defaulted from the stability ceiling at run time
        if "tau" in integ:
            tau = _positive(integ["tau"], "integrator.tau")
    tol = 1e-12
    if "tol" in integ:
        if kind != "picard":
            raise ConfigError("integrator.tol: only the picard integrator takes tol")
        tol = _positive(integ["tol"], "integrator.tol")

    T = _positive(_get(doc, "T", "config"), "config.T")

    p_list = (1.0, 2.0, INF)
    cadence = None
    if "diagnostics" in doc:
        diag = doc["diagnostics"]
        _check_keys(diag, ("p_list", "cadence"), "diagnostics")
        if "p_list" in diag:
            p_list = parse_p_list(diag["p_list"], "diagnostics.p_list")
        if "cadence" in diag:
            cadence = _positive(diag["cadence"], "diagnostics.cadence")
            if cadence > T:
                raise ConfigError(f"diagnostics.cadence: {cadence} exceeds the horizon {T}")

    return RunConfig(model, lattice, sigma, lam, potential, initial, velocity,
                     kind, tau, tol, T, p_list, cadence, echo=doc)


@dataclass(eq=False)
class GrowthSweepConfig:
    model: str
    d: int
    N: int
    h_list: tuple
    p_list: tuple
    t_grid: tuple
    trials: int
    seed: int
    echo: dict


def parse_growth_sweep(doc: dict) -> GrowthSweepConfig:
    _check_keys(doc, ("schema_version", "model", "d", "N", "h_list",
                      "p_list", "t_grid", "trials", "seed"), "config")
    version = _get(doc, "schema_version", "config")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"config.schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    model = _get(doc, "model", "config")
    if model not in ("schrodinger", "kg"):
        raise ConfigError(f"config.model: expected 'schrodinger' or 'kg', got {model!r}")
    d = _integer(_get(doc, "d", "config"), "config.d")
    N = _integer(_get(doc, "N", "config"), "config.N")
    h_list = doc.get("h_list")
    if not isinstance(h_list, list) or not h_list:
        raise ConfigError("config.h_list: expected a nonempty array")
    h_list = tuple(_positive(h, "config.h_list") for h in h_list)
    p_list = parse_p_list(_get(doc, "p_list", "config"), "config.p_list")
    t_grid = doc.get("t_grid")
    if not isinstance(t_grid, list) or not t_grid:
        raise ConfigError("config.t_grid: expected a nonempty array")
    t_grid = tuple(sorted(_number(t, "config.t_grid") for t in t_grid))
    if t_grid[0] < 0:
        raise ConfigError("config.t_grid: times must be nonnegative")
    trials = _integer(_get(doc, "trials", "config"), "config.trials")
    if trials < 1:
        raise ConfigError(f"config.trials: must be >= 1, got {trials}")
    seed = _integer(_get(doc, "seed", "config"), "config.seed")
    try:
        LatticeSpec(d, N, float(h_list[0]))
    except ValueError as e:
        raise ConfigError(f"config: {e}") from e
    return GrowthSweepConfig(model, d, N, h_list, p_list, t_grid, trials, seed, echo=doc)


@dataclass(eq=False)
class KernelSweepConfig:
    alpha: float
    d_list: tuple
    h_list: tuple
    radius: int | None
    points: int | None
    echo: dict


def parse_kernel_sweep(doc: dict) -> KernelSweepConfig:
    _check_keys(doc, ("schema_version", "alpha", "d_list", "h_list",
                      "radius", "points"), "config")
    version = _get(doc, "schema_version", "config")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"config.schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    alpha = _number(_get(doc, "alpha", "config"), "config.alpha")
    if not 0 < alpha <= 1:
        raise ConfigError(f"config.alpha: expected alpha in (0, 1], got {alpha}")
    d_list = doc.get("d_list")
    if not isinstance(d_list, list) or not d_list:
        raise ConfigError("config.d_list: expected a nonempty array")
    d_list = tuple(_integer(d, "config.d_list") for d in d_list)
    if any(d < 1 for d in d_list):
        raise ConfigError("config.d_list: dimensions must be >= 1")
    h_list = doc.get("h_list")
    if not isinstance(h_list, list) or not h_list:
        raise ConfigError("config.h_list: expected a nonempty array")
    h_list = tuple(_positive(h, "config.h_list") for h in h_list)
    if any(b >= a for a, b in zip(h_list, h_list[1:])):
        raise ConfigError("config.h_list: must be strictly decreasing")
    radius = None
    if "radius" in doc:
        radius = _integer(doc["radius"], "config.radius")
        if radius < 1:
            raise ConfigError(f"config.radius: must be >= 1, got {radius}")
    points = None
    if "points" in doc:
        points = _integer(doc["points"], "config.points")
    return KernelSweepConfig(alpha, d_list, h_list, radius, points, echo=doc)


def load_document(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path}: top level must be an object")
    return doc


def load_config(path) -> RunConfig:
    return parse_config(load_document(path))
