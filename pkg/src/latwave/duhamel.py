"""Fixed-point iteration for Duhamel integral equations on a time grid.

Solves  u(t) = P_t u0 + i * integral_0^t P_{t-s} F(u(s)) ds  for a diagonal
Fourier-multiplier propagator P_t = ifft( exp(i t phase) fft(.) ) and a
pointwise-in-space source F, by iterating the right-hand side map on a fixed
uniform grid.  The integral is evaluated in Fourier space, where the
propagator acts by multiplication, using composite Newton-Cotes weights of
order four (Simpson, with a 3/8 block when the node count is odd; the very
first node has only two samples available and falls back to the trapezoid,
whose O(tau^3) local error sits far below the iteration tolerance on any
reasonable grid).
"""

from __future__ import annotations

import numpy as np


class NonContractionError(RuntimeError):
    """The iteration failed to reach tolerance; the window is too long.

    Carries the last sup-t residual so callers can report how far off it was.
    """

    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"fixed-point iteration stalled at residual {residual:.3e} "
            f"after {iterations} iterations; shorten the time window"
        )
        self.residual = residual
        self.iterations = iterations


def newton_cotes_weights(k: int, tau: float) -> np.ndarray:
    """Weights integrating k uniform intervals of width tau at order >= 4."""
    w = np.zeros(k + 1)
    if k == 0:
        return w
    if k == 1:
        w[:] = [0.5, 0.5]
    elif k % 2 == 0:
        w[0] = w[k] = 1.0 / 3.0
        w[1:k:2] = 4.0 / 3.0
        w[2:k:2] += 2.0 / 3.0
        w[k] = 1.0 / 3.0
    else:
        w[: k - 2] += newton_cotes_weights(k - 3, 1.0)
        w[k - 3 :] += [3.0 / 8.0, 9.0 / 8.0, 9.0 / 8.0, 3.0 / 8.0]
    return w * tau


def weight_matrix(K: int, tau: float) -> np.ndarray:
    """Row k holds the quadrature weights for integral_0^{k tau}."""
    W = np.zeros((K + 1, K + 1))
    for k in range(K + 1):
        W[k, : k + 1] = newton_cotes_weights(k, tau)
    return W


def duhamel_fixed_point(u0: np.ndarray, phase: np.ndarray, source, ts: np.ndarray,
                        tol: float, max_iter: int, prefactor: complex = 1j):
    """Iterate u <- P u0 + prefactor * integral P (source o u) to a fixed point.

    u0, phase: flat complex arrays over the lattice (phase is the multiplier
    exponent: P_t multiplies the spectrum by exp(i t phase)).
    source: maps a flat physical-space array to the flat source array.
    ts: uniform grid 0 = t_0 < ... < t_K.

    Returns (trajectory array of shape (K+1, M), residual, iterations).
    """
    K = len(ts) - 1
    tau = ts[1] - ts[0] if K else 0.0
    shape = u0.shape
    M = u0.size
    W = weight_matrix(K, tau)
    # exp(i (t_k - s_j) phase) for all node pairs, flattened over the lattice
    expphase = np.exp(1j * np.multiply.outer(ts, phase.reshape(-1)))
    free = expphase * np.fft.fftn(u0.reshape(shape)).reshape(-1)

    def rhs(traj):
        src_hat = np.stack([
            np.fft.fftn(source(traj[j]).reshape(shape)).reshape(-1)
            for j in range(K + 1)
        ])
        out = np.empty((K + 1, M), dtype=np.complex128)
        for k in range(K + 1):
            integrand = expphase[: k + 1].conj() * expphase[k] * src_hat[: k + 1]
            acc = W[k, : k + 1] @ integrand
            out[k] = np.fft.ifftn((free[k] + prefactor * acc).reshape(shape)).reshape(-1)
        return out

    def supdiff(a, b):
        return float(np.max(np.sqrt(np.sum(np.abs(a - b) ** 2, axis=1))))

    traj = np.broadcast_to(u0.reshape(-1), (K + 1, M)).copy()
    residual = np.inf
    for it in range(1, max_iter + 1):
        new = rhs(traj)
        residual = supdiff(new, traj)
        traj = new
        if residual <= tol:
            # report the true defect ||u - Phi(u)|| of what we hand back
            return traj, supdiff(rhs(traj), traj), it
    raise NonContractionError(residual, max_iter)
