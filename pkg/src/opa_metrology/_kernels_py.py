"""Pure numpy implementation of the batched lossy-readout kernels."""
import numpy as np


def lossy_moments(mean, cov, w, dw, amp, noise):
    """Readout mean, slope and variance after per-mode loss, for a batch of loss points.

    Parameters
    ----------
    mean, cov : ndarray
        Pre-loss first and second moments, shapes ``(2n,)`` and ``(2n, 2n)``.
    w, dw : ndarray
        Readout vector and its derivative with respect to the estimated phase,
        both ``(2n,)``.
    amp, noise : ndarray
        Per-point, per-mode amplitude factor and added vacuum variance, shape
        ``(P, n)``.

    Returns
    -------
    value, slope, variance : ndarray
        Each of shape ``(P,)``.
    """
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    w = np.asarray(w, dtype=float)
    dw = np.asarray(dw, dtype=float)
    amp = np.atleast_2d(np.asarray(amp, dtype=float))
    noise = np.atleast_2d(np.asarray(noise, dtype=float))
    n = w.shape[0] // 2

    a = np.concatenate([amp, amp], axis=1)
    u = a * w
    value = u @ mean
    slope = (a * dw) @ mean
    variance = np.einsum("pi,ij,pj->p", u, cov, u) + noise @ (w[:n] ** 2 + w[n:] ** 2)
    return value, slope, variance


def projected_samples(samples, w):
    """Project raw quadrature samples ``(N, 2n)`` onto the readout vector ``w``."""
    return np.asarray(samples, dtype=float) @ np.asarray(w, dtype=float)
