"""Lattice geometry, field containers, norms, and the discrete Fourier transform.

The spatial domain is a periodic truncation of the lattice h*Z^d with N points
per axis.  A site multi-index k = (k_1, ..., k_d), k_j in {0, ..., N-1}, sits
at physical position n = h*k; neighbor access wraps modulo N.  The dual grid
samples the frequency torus [0, 2*pi/h]^d at xi_m = 2*pi*m/(N*h).

Norms are plain sums over sites -- deliberately *without* an h^d quadrature
weight -- because every growth constant verified elsewhere in this package
(e.g. exp(2*d*t/h^2) for the free Schrodinger flow) is stated for exactly
these unweighted norms.

With the convention  u_hat(xi_m) = sum_k u_k exp(-i n . xi_m),  n = h*k, the
forward transform coincides with the standard unnormalized FFT and Plancherel
reads  ||u||_{l^2}^2 = N^{-d} sum_m |u_hat_m|^2,  which is the dual-grid
quadrature (2*pi/(N*h))^d standing in for d(xi) times (2*pi/h)^{-d}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Sentinel accepted anywhere an l^p exponent appears; distinct from every
#: finite real, compares strictly greater than any of them.
INF = math.inf


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic lattice truncation: dimension d, N points per axis, spacing h."""

    d: int
    N: int
    h: float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.N < 2:
            raise ValueError(f"need at least 2 points per axis, got {self.N}")
        if not self.h > 0:
            raise ValueError(f"lattice spacing must be positive, got {self.h}")
        if self.N ** self.d > 2 ** 26:
            raise ValueError(f"site count {self.N}^{self.d} exceeds supported size")

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.d

    @property
    def size(self) -> int:
        return self.N ** self.d

    def dual_axis(self) -> np.ndarray:
        """Frequency samples 2*pi*m/(N*h), m = 0..N-1, along one axis."""
        return 2.0 * np.pi * np.arange(self.N) / (self.N * self.h)

    def site_index(self) -> np.ndarray:
        """Integer index k = 0..N-1 along one axis."""
        return np.arange(self.N)


@dataclass(eq=False)
class Field:
    """Complex-valued lattice function; flat row-major storage of length N^d.

    Value semantics: the constructor copies, operations never mutate.
    """

    spec: LatticeSpec
    values: np.ndarray
    diverged: bool = field(default=False, compare=False)

    _dtype = np.complex128

    def __post_init__(self):
        v = np.array(self.values, dtype=self._dtype).reshape(-1)
        if v.size != self.spec.size:
            raise ValueError(
                f"expected {self.spec.size} values for {self.spec}, got {v.size}"
            )
        self.values = v

    def grid(self) -> np.ndarray:
        """d-dimensional row-major view of the flat storage."""
        return self.values.reshape(self.spec.shape)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def copy(self):
        return type(self)(self.spec, self.values)


@dataclass(eq=False)
class RealField(Field):
    """Real-valued lattice function (potentials, Klein-Gordon states)."""

    _dtype = np.float64


def as_complex(f: RealField) -> Field:
    """Promote a real field to a complex one."""
    return Field(f.spec, f.values.astype(np.complex128))


# ---------------------------------------------------------------------------
# constructors for common initial data


def delta_field(spec: LatticeSpec, amplitude=1.0) -> Field:
    """amplitude at the origin site, zero elsewhere."""
    v = np.zeros(spec.size, dtype=np.complex128)
    v[0] = amplitude
    return Field(spec, v)


def real_delta_field(spec: LatticeSpec, amplitude=1.0) -> RealField:
    v = np.zeros(spec.size)
    v[0] = amplitude
    return RealField(spec, v)


def constant_field(spec: LatticeSpec, value=1.0) -> Field:
    return Field(spec, np.full(spec.size, value, dtype=np.complex128))


def random_field(spec: LatticeSpec, seed: int, amplitude=1.0) -> Field:
    """Complex Gaussian entries, reproducible from the seed."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(spec.size) + 1j * rng.standard_normal(spec.size)
    return Field(spec, amplitude * v / math.sqrt(2.0))

def random_real_field(spec: LatticeSpec, seed: int, amplitude=1.0) -> RealField:
    rng = np.random.default_rng(seed)
    return RealField(spec, amplitude * rng.standard_normal(spec.size))


def gaussian_field(spec: LatticeSpec, width: float, amplitude=1.0) -> RealField:
    """amplitude * exp(-|n|^2 / (2 width^2)) centered at the origin site.

    Distances use the wrapped (nearest-image) position on the torus.
    """
    if width <= 0:
        raise ValueError("width must be positive")
    k = np.arange(spec.N)
    k = np.minimum(k, spec.N - k)  # nearest periodic image
    x = spec.h * k
    r2 = np.zeros(spec.shape)
    for j in range(spec.d):
        sh = [1] * spec.d
        sh[j] = spec.N
        r2 = r2 + (x ** 2).reshape(sh)
    return RealField(spec, amplitude * np.exp(-r2 / (2.0 * width ** 2)).reshape(-1))


# ---------------------------------------------------------------------------
# norms and inner product


def lp_norm(f: Field, p) -> float:
    """Unweighted lattice norm (sum_n |f_n|^p)^(1/p); p = INF gives sup |f_n|."""
    if p == INF:
        return float(np.max(np.abs(f.values))) if f.spec.size else 0.0
    if p < 1:
        raise ValueError(f"l^p norm requires p >= 1 or p = inf, got {p}")
    a = np.abs(f.values)
    if p == 1:
        return float(np.sum(a))
    if p == 2:
        return float(math.sqrt(np.sum(a * a)))
    return float(np.sum(a ** p) ** (1.0 / p))


def inner(f: Field, g: Field) -> complex:
    """Sesquilinear pairing sum_n f_n * conj(g_n); conjugate-linear in g."""
    if f.spec != g.spec:
        raise ValueError(f"lattice mismatch: {f.spec} vs {g.spec}")
    return complex(np.vdot(g.values, f.values))


# ---------------------------------------------------------------------------
# discrete Fourier transform on the dual grid


def dft(f: Field) -> Field:
    """Forward transform: samples of sum_k f_k exp(-i n . xi) on the dual grid."""
    return Field(f.spec, np.fft.fftn(f.grid().astype(np.complex128)).reshape(-1))


def idft(F: Field) -> Field:
    """Inverse transform; idft(dft(f)) == f to roundoff for any N (not just 2^k)."""
    return Field(F.spec, np.fft.ifftn(F.grid()).reshape(-1))


def plancherel_defect(f: Field) -> float:
    """Relative gap in ||f||_2^2 = N^{-d} sum |f_hat|^2 (zero in exact arithmetic)."""
    lhs = lp_norm(f, 2) ** 2
    rhs = float(np.sum(np.abs(dft(f).values) ** 2)) / f.spec.size
    scale = max(lhs, rhs, 1e-300)
    return abs(lhs - rhs) / scale
