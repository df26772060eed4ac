"""Bounded real potentials V and the standing assumptions they must satisfy.

Generation is a pure function of (PotentialSpec, LatticeSpec): repeated calls
are bitwise identical, with randomness drawn from a counter-based generator
(numpy PCG64) seeded explicitly.  Note that on a periodic truncation a
"quasiperiodic" potential is only quasiperiodic up to wrap-around; the
generated values are the honest samples of A*cos(2*pi*(theta + k.alpha)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import LatticeSpec, RealField

RNG_ALGORITHM = "numpy-pcg64"

KINDS = ("zero", "constant", "periodic", "iid_uniform", "quasiperiodic")


@dataclass(frozen=True)
class PotentialSpec:
    """Declarative description of V; only the fields of the chosen kind matter.

    kind 'zero':          V = 0
    kind 'constant':      V = c
    kind 'periodic':      V at site k = pattern[k_1 mod len(pattern)]
                          (repeats along the first axis, constant across others)
    kind 'iid_uniform':   independent Uniform[lo, hi) entries from seed
    kind 'quasiperiodic': A * cos(2*pi*(sum_j theta_j + k_j alpha_j)), cosine
                          waveform with phase theta and frequency alpha
    """

    kind: str
    c: float = 0.0
    pattern: tuple = ()
    lo: float = 0.0
    hi: float = 1.0
    seed: int = 0
    amplitude: float = 1.0
    phase: tuple = ()
    frequency: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "periodic" and len(self.pattern) == 0:
            raise ValueError("periodic potential needs a nonempty pattern")
        if self.kind == "iid_uniform" and not self.lo <= self.hi:
            raise ValueError(f"empty uniform range [{self.lo}, {self.hi})")


def zero_potential() -> PotentialSpec:
    return PotentialSpec("zero")


def constant_potential(c: float) -> PotentialSpec:
    return PotentialSpec("constant", c=float(c))


def generate(spec: PotentialSpec, lat: LatticeSpec) -> RealField:
    """Sample the potential on the lattice; deterministic given (spec, lat)."""
    if spec.kind == "zero":
        return RealField(lat, np.zeros(lat.size))
    if spec.kind == "constant":
        return RealField(lat, np.full(lat.size, spec.c))
    if spec.kind == "periodic":
        L = len(spec.pattern)
        if lat.N % L != 0:
            raise ValueError(
                f"pattern length {L} does not divide N={lat.N}; wrap would break periodicity"
            )
        row = np.asarray(spec.pattern, dtype=float)[np.arange(lat.N) % L]
        g = np.broadcast_to(row.reshape((lat.N,) + (1,) * (lat.d - 1)), lat.shape)
        return RealField(lat, g.reshape(-1))
    if spec.kind == "iid_uniform":
        rng = np.random.default_rng(spec.seed)
        return RealField(lat, rng.uniform(spec.lo, spec.hi, size=lat.size))
    # quasiperiodic
    theta = _per_axis(spec.phase, lat.d, 0.0)
    alpha = _per_axis(spec.frequency, lat.d, (np.sqrt(5.0) - 1.0) / 2.0)
    arg = np.zeros(lat.shape)
    k = np.arange(lat.N)
    for j in range(lat.d):
        sh = [1] * lat.d
        sh[j] = lat.N
        arg = arg + (theta[j] + k * alpha[j]).reshape(sh)
    return RealField(lat, spec.amplitude * np.cos(2.0 * np.pi * arg).reshape(-1))


def _per_axis(values, d, default):
    if len(values) == 0:
        return [default] * d
    if len(values) == 1:
        return [float(values[0])] * d
    if len(values) != d:
        raise ValueError(f"need {d} per-axis values, got {len(values)}")
    return [float(v) for v in values]


def validate_kg_defocusing(V: RealField, h: float) -> dict:
    """Global-existence assumption for the defocusing wave flow.

    Requires inf_n (h^2 V_n + 2d) > 0; returns the largest admissible margin
    delta0 = min(h^2 V_n) + 2d along with the verdict.
    """
    delta0 = float(np.min(h ** 2 * V.values) + 2 * V.spec.d)
    return {"ok": delta0 > 0.0, "delta0": delta0}


def validate_blowup_assumption(V: RealField) -> bool:
    """The blow-up construction needs a strictly positive potential."""
    return bool(np.min(V.values) > 0.0)
