# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched lossy-readout kernels. Same contract as ``_kernels_py``."""
import numpy as np
cimport cython


cdef void _moments(const double[::1] mean, const double[:, ::1] cov,
                   const double[::1] w, const double[::1] dw,
                   const double[:, ::1] amp, const double[:, ::1] noise,
                   double[::1] value, double[::1] slope, double[::1] variance,
                   double[::1] u) noexcept nogil:
    cdef Py_ssize_t P = amp.shape[0]
    cdef Py_ssize_t n = amp.shape[1]
    cdef Py_ssize_t m = 2 * n
    cdef Py_ssize_t p, i, j
    cdef double a, v, s, q, row, vac
    for p in range(P):
        v = 0.0
        s = 0.0
        vac = 0.0
        for i in range(m):
            a = amp[p, i % n]
            u[i] = a * w[i]
            v += u[i] * mean[i]
            s += a * dw[i] * mean[i]
        for i in range(n):
            vac += noise[p, i] * (w[i] * w[i] + w[n + i] * w[n + i])
        q = 0.0
        for i in range(m):
            row = 0.0
            for j in range(m):
                row += cov[i, j] * u[j]
            q += u[i] * row
        value[p] = v
        slope[p] = s
        variance[p] = q + vac


def lossy_moments(mean, cov, w, dw, amp, noise):
    cdef const double[::1] mean_v = np.ascontiguousarray(mean, dtype=np.float64)
    cdef const double[:, ::1] cov_v = np.ascontiguousarray(cov, dtype=np.float64)
    cdef const double[::1] w_v = np.ascontiguousarray(w, dtype=np.float64)
    cdef const double[::1] dw_v = np.ascontiguousarray(dw, dtype=np.float64)
    amp_a = np.ascontiguousarray(np.atleast_2d(amp), dtype=np.float64)
    noise_a = np.ascontiguousarray(np.atleast_2d(noise), dtype=np.float64)
    if amp_a.shape != noise_a.shape or 2 * amp_a.shape[1] != w_v.shape[0]:
        raise ValueError(f"inconsistent shapes: amp {amp_a.shape}, noise {noise_a.shape}, w {w_v.shape[0]}")
    cdef const double[:, ::1] amp_v = amp_a
    cdef const double[:, ::1] noise_v = noise_a
    P = amp_a.shape[0]
    value = np.empty(P)
    slope = np.empty(P)
    variance = np.empty(P)
    u = np.empty(w_v.shape[0])
    cdef double[::1] value_v = value
    cdef double[::1] slope_v = slope
    cdef double[::1] var_v = variance
    cdef double[::1] u_v = u
    with nogil:
        _moments(mean_v, cov_v, w_v, dw_v, amp_v, noise_v, value_v, slope_v, var_v, u_v)
    return value, slope, variance


def projected_samples(samples, w):
    cdef const double[:, ::1] x = np.ascontiguousarray(samples, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t N = x.shape[0]
    cdef Py_ssize_t m = x.shape[1]
    cdef Py_ssize_t k, i
    cdef double acc
    out = np.empty(N)
    cdef double[::1] o = out
    with nogil:
        for k in range(N):
            acc = 0.0
            for i in range(m):
                acc += x[k, i] * wv[i]
            o[k] = acc
    return out
