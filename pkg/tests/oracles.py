"""Independent reference model for the tests.

Tracks each output annihilation operator as ``c_k = m_k + sum_j (u_kj v_j + w_kj v_j^dag)``
over independent vacuum inputs ``v_j``. Loss appends a fresh vacuum input per
use. Nothing here touches the real symplectic matrices of the package.
"""
import numpy as np


class ModeOracle:
    def __init__(self, n):
        self.n = n
        self.m = np.zeros(n, dtype=complex)
        self.u = np.eye(n, dtype=complex)
        self.w = np.zeros((n, n), dtype=complex)

    def _mix(self, k, a, b):
        # c_k -> a c_k + b c_k^dag
        m, u, w = self.m[k], self.u[k].copy(), self.w[k].copy()
        self.m[k] = a * m + b * np.conj(m)
        self.u[k] = a * u + b * np.conj(w)
        self.w[k] = a * w + b * np.conj(u)

    def squeeze_x(self, k, r):
        self._mix(k, np.cosh(r), np.sinh(r))

    def squeeze_y(self, k, r):
        self._mix(k, np.cosh(r), -np.sinh(r))

    def displace(self, k, alpha, beta):
        self.m[k] += (alpha + 1j * beta) / 2

    def passive(self, U):
        U = np.asarray(U, dtype=complex)
        self.m = U @ self.m
        self.u = U @ self.u
        self.w = U @ self.w

    def loss(self, k, eta):
        t, s = np.sqrt(eta), np.sqrt(1 - eta)
        self.m[k] *= t
        self.u[k] *= t
        self.w[k] *= t
        self.u = np.hstack([self.u, np.zeros((self.n, 1))])
        self.w = np.hstack([self.w, np.zeros((self.n, 1))])
        self.u[k, -1] = s

    def readout(self, terms):
        """Mean, variance and slope of sum coeff * [X cos(theta+phi) + Y sin(theta+phi)].

        ``terms`` holds (mode, coeff, theta, phi, estimated) tuples.
        """
        g = np.zeros(self.n, dtype=complex)
        dg = np.zeros(self.n, dtype=complex)
        for k, c, th, ph, est in terms:
            g[k] = c * np.exp(-1j * (th + ph))
            if est:
                dg[k] = -1j * g[k]
        A = g @ self.u + np.conj(g) @ np.conj(self.w)
        mean = 2 * np.real(g @ self.m)
        slope = 2 * np.real(dg @ self.m)
        return mean, float(np.sum(np.abs(A) ** 2)), slope


def epr_oracle(r1, r2, r3, r4, beta1, beta2, eta1, eta2, theta, phi, phase, alpha=(0.0, 0.0)):
    o = ModeOracle(2)
    o.squeeze_x(0, r1)
    o.squeeze_y(1, r2)
    o.displace(0, alpha[0], beta1)
    o.displace(1, alpha[1], beta2)
    o.passive(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    o.squeeze_y(0, r3)
    o.squeeze_y(1, r4)
    o.loss(0, eta1)
    o.loss(1, eta2)
    _, var, slope = o.readout([(0, 1, theta, phi, phase == 1), (1, 1, theta, phi, phase == 2)])
    return np.sqrt(var) / abs(slope)


CLUSTER_READOUT = {1: (0, (2, 3)), 2: (1, (2, 3)), 3: (2, (0, 1)), 4: (3, (0, 1))}


def cluster_oracle(k, U, r, rp, alpha, beta, eta, theta):
    o = ModeOracle(4)
    for m in range(4):
        o.squeeze_x(m, r)
        o.displace(m, alpha[m], beta[m])
    o.passive(U)
    minuend, subs = CLUSTER_READOUT[k]
    o.squeeze_y(minuend, rp)
    for m in subs:
        o.squeeze_x(m, rp)
    for m in range(4):
        o.loss(m, eta[m])
    terms = [(minuend, 1.0, theta, np.pi / 2, True)] + [(m, -1.0, theta, 0.0, False) for m in subs]
    _, var, slope = o.readout(terms)
    return np.sqrt(var) / abs(slope)
