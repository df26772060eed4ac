"""Fourier multipliers on the periodic lattice.

Covers the second-difference stencil, its dual-torus symbol, fractional powers
of (1 - Delta_h), the two linear propagators, and extraction of convolution
kernels b_n from an arbitrary smooth symbol (the mechanism behind the l^p
multiplier bounds: ||T f||_p <= ||b||_{l^1} ||f||_p by Young's inequality).

Sign conventions are pinned by the generating equations, not by notation:

    i u' - Delta_h u = 0            =>  u_hat(t) = exp(+i t s(xi)) u_hat(0)
    i u' - sqrt(1 - Delta_h) u = 0  =>  u_hat(t) = exp(-i t sqrt(1 + s(xi))) u_hat(0)

where s(xi) = (4/h^2) sum_j sin^2(h xi_j / 2) in [0, 4d/h^2] is the symbol of
-Delta_h.  Both conventions are cross-checked against dense eigendecomposition
oracles in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .lattice import Field, LatticeSpec, RealField


@dataclass(eq=False)
class MultiplierSymbol:
    """Symbol samples on the dual grid, flat row-major like Field values."""

    spec: LatticeSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values).reshape(-1)
        if v.size != self.spec.size:
            raise ValueError(f"expected {self.spec.size} symbol samples, got {v.size}")
        self.values = v


@dataclass(eq=False)
class KernelCoefficients:
    """Convolution coefficients b_n of a symbol on the index box |n_j| <= R.

    values has shape (2R+1,)*d with axis index i corresponding to n_j = i - R.
    quad_error is the max-abs change when the quadrature resolution doubles
    from Q to 2Q points per axis; converged flags whether it met the requested
    tolerance (a flagged-but-returned result, never a silent one).
    """

    radius: int
    values: np.ndarray
    quadrature_points_per_axis: int
    quad_error: float
    converged: bool

    @property
    def d(self) -> int:
        return self.values.ndim


@lru_cache(maxsize=64)
def _minus_laplacian_symbol(spec: LatticeSpec) -> np.ndarray:
    """Cached flat samples of s(xi) = (4/h^2) sum_j sin^2(pi m_j / N)."""
    axis = np.sin(np.pi * np.arange(spec.N) / spec.N) ** 2
    s = np.zeros(spec.shape)
    for j in range(spec.d):
        sh = [1] * spec.d
        sh[j] = spec.N
        s = s + axis.reshape(sh)
    out = (4.0 / spec.h ** 2) * s.reshape(-1)
    out.setflags(write=False)
    return out


def laplacian_symbol(spec: LatticeSpec) -> MultiplierSymbol:
    """Samples of s(xi_m); applying Delta_h in Fourier space multiplies by -s."""
    return MultiplierSymbol(spec, _minus_laplacian_symbol(spec).copy())


def discrete_laplacian(f: Field) -> Field:
    """(Delta_h f)_n = h^-2 sum_j (f_{n+he_j} + f_{n-he_j} - 2 f_n), periodic."""
    g = f.grid()
    acc = -2.0 * f.spec.d * g
    for j in range(f.spec.d):
        acc = acc + np.roll(g, 1, axis=j) + np.roll(g, -1, axis=j)
    return type(f)(f.spec, (acc / f.spec.h ** 2).reshape(-1))


def apply_multiplier(f: Field, symbol_values: np.ndarray) -> Field:
    """Inverse-transform(symbol * transform(f)); returns the same field kind.

    Real input with a real symbol stays real (the symbol is even on the
    grid), so RealField in gives RealField out with the roundoff imaginary
    part dropped.
    """
    spec = f.spec
    fhat = np.fft.fftn(f.grid().astype(np.complex128))
    out = np.fft.ifftn(symbol_values.reshape(spec.shape) * fhat).reshape(-1)
    if isinstance(f, RealField) and not np.iscomplexobj(symbol_values):
        return RealField(spec, out.real)
    return Field(spec, out)


def bessel_power(f: Field, alpha: float) -> Field:
    """(1 - Delta_h)^alpha f via the symbol M(xi)^alpha, M = 1 + s.

    alpha is restricted to [-1, 1]; larger powers are not needed anywhere and
    are rejected rather than silently extrapolated.
    """
    if not -1.0 <= alpha <= 1.0:
        raise ValueError(f"power must lie in [-1, 1], got {alpha}")
    if alpha == 0.0:
        return f.copy()
    m = (1.0 + _minus_laplacian_symbol(f.spec)) ** alpha
    return apply_multiplier(f, m)


def schrodinger_propagator(f: Field, t: float) -> Field:
    """Exact flow of  i u' - Delta_h u = 0  on the truncation (l^2 isometry)."""
    phase = np.exp(1j * t * _minus_laplacian_symbol(f.spec))
    return apply_multiplier(Field(f.spec, f.values), phase)


def kg_propagator(f: Field, t: float) -> Field:
    """Exact flow of  i u' - sqrt(1 - Delta_h) u = 0  (l^2 isometry)."""
    phase = np.exp(-1j * t * np.sqrt(1.0 + _minus_laplacian_symbol(f.spec)))
    return apply_multiplier(Field(f.spec, f.values), phase)


# ---------------------------------------------------------------------------
# kernel extraction:  b_n = h^d (2 pi)^-d  integral over [0, 2pi/h]^d of
#                     exp(+i n . xi) m(xi) d xi
#
# i.e. b is the inverse transform of the symbol, so that convolution with b,
# (T f)_n = sum_j b_j f_{n - h j}, applies the multiplier m itself: the shift
# symbol exp(-i h k . xi) yields a delta at +k.  For the even symbols M^alpha
# this agrees with the opposite phase convention coefficient-by-coefficient,
# and the l^1 norm (hence the operator bound) never depends on the choice.


def bessel_symbol_function(d: int, h: float, alpha: float):
    """Callable M(xi)^alpha with M(xi) = 1 + (4/h^2) sum_j sin^2(h xi_j / 2).

    The returned function accepts a sequence of d broadcastable arrays, one
    per frequency component.
    """

    def m(xi):
        s = 0.0
        for j in range(d):
            s = s + np.sin(0.5 * h * np.asarray(xi[j])) ** 2
        return (1.0 + (4.0 / h ** 2) * s) ** alpha

    return m


def _kernel_box_at_resolution(m, spec: LatticeSpec, R: int, Q: int) -> np.ndarray:
    """Trapezoid-rule kernel on the box |n_j| <= R using Q points per axis.

    On the periodic integration domain the trapezoid rule is the plain mean
    over equispaced samples, which is exactly the unnormalized FFT divided by
    Q^d; sampling at Q > 2R+1 points avoids aliasing the box.
    """
    d = spec.d
    axis = 2.0 * np.pi * np.arange(Q) / (Q * spec.h)
    xi = []
    for j in range(d):
        sh = [1] * d
        sh[j] = Q
        xi.append(axis.reshape(sh))
    samples = np.broadcast_to(m(xi), (Q,) * d).astype(np.complex128)
    coeffs = np.fft.ifftn(samples)  # index k holds the exp(+i n.xi) average
    idx = np.arange(-R, R + 1) % Q
    return coeffs[np.ix_(*([idx] * d))]


def multiplier_kernel(m, spec: LatticeSpec, R: int, Q: int | None = None,
                      quad_tol: float = 1e-9) -> KernelCoefficients:
    """Kernel coefficients of the symbol m on the box |n_j| <= R.

    m: callable on a sequence of d frequency arrays (see
    bessel_symbol_function).  Q defaults to the minimum admissible
    8*(2R+1) points per axis; the quadrature error is estimated by
    re-evaluating at 2Q and reported on the result, with `converged`
    cleared when the estimate exceeds quad_tol relative to max|b|.
    """
    if R < 1:
        raise ValueError(f"kernel radius must be >= 1, got {R}")
    if Q is None:
        Q = 8 * (2 * R + 1)
    if Q < 8 * (2 * R + 1):
        raise ValueError(f"need Q >= 8*(2R+1) = {8 * (2 * R + 1)}, got {Q}")
    b = _kernel_box_at_resolution(m, spec, R, Q)
    b2 = _kernel_box_at_resolution(m, spec, R, 2 * Q)
    err = float(np.max(np.abs(b - b2)))
    scale = max(float(np.max(np.abs(b))), 1e-300)
    converged = err <= quad_tol * scale
    if np.max(np.abs(b.imag)) <= 1e-13 * scale:
        b = b.real  # conjugate-symmetric symbol -> real kernel
    return KernelCoefficients(R, b, Q, err, converged)


def kernel_l1_norm(k: KernelCoefficients) -> float:
    """sum |b_n| over the stored box."""
    return float(np.sum(np.abs(k.values)))


def kernel_tail_fraction(k: KernelCoefficients) -> float:
    """Mass fraction on the outermost shell max_j |n_j| = R.

    Values above 0.01 indicate the truncation radius R was too small for the
    symbol's decay and the l^1 norm is untrustworthy.
    """
    a = np.abs(k.values)
    total = float(np.sum(a))
    if total == 0.0:
        return 0.0
    core = a[(slice(1, -1),) * k.d]
    return (total - float(np.sum(core))) / total


def kernel_truncation_warning(k: KernelCoefficients, threshold: float = 0.01) -> bool:
    return kernel_tail_fraction(k) > threshold


def convolve_kernel(f: Field, k: KernelCoefficients) -> Field:
    """(T f)_n = sum_{|j| <= R} b_j f_{n - h j} with periodic wrap.

    Direct realization of the operator whose l^p norms the kernel l^1 norm
    bounds; used to verify the transfer inequality, not for production runs.
    """
    g = f.grid()
    out = np.zeros_like(g, dtype=np.complex128)
    R = k.radius
    for offset in np.ndindex(*k.values.shape):
        j = tuple(o - R for o in offset)
        out = out + k.values[offset] * np.roll(g, shift=j, axis=tuple(range(f.spec.d)))
    return Field(f.spec, out.reshape(-1))
