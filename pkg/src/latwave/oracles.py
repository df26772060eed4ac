"""Brute-force oracles for the test suite.

Everything here is deliberately slow and structurally independent of the
spectral fast paths: dense stencil matrices with matrix functions taken via
eigendecomposition (exact for Hermitian circulants), literal O(M^2)
Fourier summation, and centered finite differences.  Size-capped so a full
oracle comparison stays under a few seconds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import Field, LatticeSpec

SIZE_CAP = 4096


@dataclass(eq=False)
class DenseOperator:
    """Explicit M x M matrix acting on flat field vectors, M = N^d."""

    size: int
    matrix: np.ndarray

    def apply(self, f: Field) -> Field:
        return Field(f.spec, self.matrix @ f.values)


def _check_size(spec: LatticeSpec) -> int:
    if spec.size > SIZE_CAP:
        raise ValueError(f"dense oracle capped at {SIZE_CAP} sites, got {spec.size}")
    return spec.size


def _dense_laplacian_matrix(spec: LatticeSpec) -> np.ndarray:
    eye = np.eye(spec.N)
    ring = (np.roll(eye, 1, axis=1) + np.roll(eye, -1, axis=1) - 2.0 * eye) / spec.h ** 2
    mats = []
    for j in range(spec.d):
        factors = [eye] * spec.d
        factors[j] = ring
        term = factors[0]
        for fac in factors[1:]:
            term = np.kron(term, fac)
        mats.append(term)
    return sum(mats)


def assemble_dense(op: str, spec: LatticeSpec, *, t: float | None = None,
                   alpha: float | None = None) -> DenseOperator:
    """Dense realization of one of the spectral operators.

    op: 'laplacian' | 'bessel_power' (needs alpha) | 'schrodinger_propagator'
    (needs t) | 'kg_propagator' (needs t).  Matrix functions are evaluated by
    eigendecomposition of the Hermitian generator, so there is no series
    truncation to account for.
    """
    size = _check_size(spec)
    lap = _dense_laplacian_matrix(spec)
    if op == "laplacian":
        return DenseOperator(size, lap)
    mu, W = np.linalg.eigh(lap)
    if op == "bessel_power":
        if alpha is None:
            raise ValueError("bessel_power needs alpha")
        diag = (1.0 - mu) ** alpha
    elif op == "schrodinger_propagator":
        if t is None:
            raise ValueError("schrodinger_propagator needs t")
        diag = np.exp(-1j * t * mu)  # u(t) = exp(-i t Delta_h) u0
    elif op == "kg_propagator":
        if t is None:
            raise ValueError("kg_propagator needs t")
        diag = np.exp(-1j * t * np.sqrt(1.0 - mu))
    else:
        raise ValueError(f"unknown dense operator {op!r}")
    return DenseOperator(size, (W * diag) @ W.conj().T)


def direct_dft(f: Field) -> Field:
    """Literal summation F_m = sum_k f_k exp(-2 pi i k.m / N), one m at a time."""
    spec = f.spec
    _check_size(spec)
    kgrids = np.unravel_index(np.arange(spec.size), spec.shape)
    out = np.empty(spec.size, dtype=np.complex128)
    for flat_m in range(spec.size):
        m = np.unravel_index(flat_m, spec.shape)
        phase = sum(kgrids[j] * m[j] for j in range(spec.d))
        out[flat_m] = np.sum(f.values * np.exp(-2j * np.pi * phase / spec.N))
    return Field(spec, out)


def direct_kernel_coefficients(m, spec: LatticeSpec, R: int, Q: int) -> np.ndarray:
    """Kernel box via literal Riemann sums at Q points per axis (no FFT).

    Independent cross-check for the fast kernel path; O((2R+1)^d * Q^d).
    """
    d = spec.d
    axis = 2.0 * np.pi * np.arange(Q) / (Q * spec.h)
    xi = []
    for j in range(d):
        sh = [1] * d
        sh[j] = Q
        xi.append(axis.reshape(sh))
    samples = np.broadcast_to(m(xi), (Q,) * d)
    out = np.empty((2 * R + 1,) * d, dtype=np.complex128)
    for offset in np.ndindex(*out.shape):
        n = tuple(spec.h * (o - R) for o in offset)
        phase = sum(n[j] * xi[j] for j in range(d))
        out[offset] = np.sum(samples * np.exp(1j * phase)) / Q ** d
    return out


def finite_diff_second(series, tau: float) -> np.ndarray:
    """Centered second differences (y[k-1] - 2 y[k] + y[k+1]) / tau^2.

    Endpoints are omitted; exact for quadratics, O(tau^2) otherwise.
    """
    y = np.asarray(series, dtype=float)
    if y.ndim != 1 or y.size < 3:
        raise ValueError("need at least 3 uniformly spaced samples")
    return (y[2:] - 2.0 * y[1:-1] + y[:-2]) / tau ** 2
