"""Multimode Gaussian states and exact mean/covariance propagation.

Quadratures are X = a + a^dag and Y = -i(a - a^dag), so the vacuum has unit
variance in both (the shot-noise level). Vectors are ordered
``(X_1, ..., X_n, Y_1, ..., Y_n)``.

All operations are pure: they return a new :class:`GaussianState` and never
modify their inputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-10
UNITARY_TOL = 1e-10


class Orientation(str, Enum):
    AMPLIFY_X = "amplify-X"
    AMPLIFY_Y = "amplify-Y"


class LossConvention(str, Enum):
    PHYSICAL = "physical"
    PAPER_LINEAR = "paper-linear"


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return Omega for the (X-block; Y-block) ordering, so that [q_i, q_j] = 2i Omega_ij."""
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix of ``n_modes`` bosonic modes."""

    n_modes: int
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        n = self.n_modes
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.shape != (2 * n,) or cov.shape != (2 * n, 2 * n):
            raise ValueError(
                f"shape mismatch for {n} modes: mean {mean.shape}, cov {cov.shape}"
            )
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen(0.5 * (cov + cov.T)))

    def x(self, mode: int) -> int:
        """Index of the amplitude quadrature of ``mode``."""
        return mode

    def y(self, mode: int) -> int:
        """Index of the phase quadrature of ``mode``."""
        return self.n_modes + mode

    def _check_mode(self, mode: int) -> None:
        if not 0 <= mode < self.n_modes:
            raise ValueError(f"mode {mode} out of range for {self.n_modes}-mode state")


@dataclass(frozen=True, eq=False)
class SymplecticOp:
    """Gaussian unitary acting as ``q -> matrix @ q + displacement``."""

    matrix: np.ndarray
    displacement: np.ndarray | None = None

    def __post_init__(self):
        m = _frozen(self.matrix)
        d = np.zeros(m.shape[0]) if self.displacement is None else self.displacement
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "displacement", _frozen(d))

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def apply(self, state: GaussianState) -> GaussianState:
        if state.n_modes != self.n_modes:
            raise ValueError(
                f"operator acts on {self.n_modes} modes, state has {state.n_modes}"
            )
        S = self.matrix
        return GaussianState(
            state.n_modes, S @ state.mean + self.displacement, S @ state.cov @ S.T
        )

    def then(self, other: SymplecticOp) -> SymplecticOp:
        """Composite operator: apply ``self`` first, then ``other``."""
        return SymplecticOp(
            other.matrix @ self.matrix,
            other.matrix @ self.displacement + other.displacement,
        )

    def symplectic_error(self) -> float:
        omega = symplectic_form(self.n_modes)
        S = self.matrix
        return float(np.max(np.abs(S @ omega @ S.T - omega)))


@dataclass(frozen=True)
class LossChannel:
    mode: int
    eta: float
    convention: LossConvention = LossConvention.PHYSICAL

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"transmissivity eta={self.eta} outside [0, 1]")
        object.__setattr__(self, "convention", LossConvention(self.convention))

    def coefficients(self) -> tuple[float, float]:
        """Return (amplitude factor on the mean, added vacuum variance)."""
        return loss_coefficients(self.eta, self.convention)

    def apply(self, state: GaussianState) -> GaussianState:
        state._check_mode(self.mode)
        amp, noise = self.coefficients()
        idx = [state.x(self.mode), state.y(self.mode)]
        scale = np.ones(2 * state.n_modes)
        scale[idx] = amp
        cov = scale[:, None] * state.cov * scale[None, :]
        cov[idx, idx] += noise
        return GaussianState(state.n_modes, scale * state.mean, cov)


def loss_coefficients(eta, convention=LossConvention.PHYSICAL):
    """Mean amplitude factor and added vacuum variance for transmissivity ``eta``.

    Works elementwise on arrays. The paper-linear form mixes with linear
    weights ``eta`` and ``1 - eta`` and is not completely positive for
    ``0 < eta < 1``; it exists only for comparison with closed forms written
    in that convention.
    """
    eta = np.asarray(eta, dtype=float) if np.ndim(eta) else float(eta)
    if LossConvention(convention) is LossConvention.PHYSICAL:
        return np.sqrt(eta), 1.0 - eta
    return eta, (1.0 - eta) ** 2


# -- operator constructors ---------------------------------------------------


def _embed(n_modes: int, modes: list[int], block: np.ndarray) -> np.ndarray:
    """Embed a 2k x 2k local map on ``modes`` into the full 2n x 2n identity."""
    idx = list(modes) + [n_modes + m for m in modes]
    S = np.eye(2 * n_modes)
    S[np.ix_(idx, idx)] = block
    return S


def squeezer_op(n_modes, mode, r, orientation=Orientation.AMPLIFY_X) -> SymplecticOp:
    if not np.isfinite(r):
        raise ValueError(f"squeezing parameter must be finite, got {r}")
    sign = 1.0 if Orientation(orientation) is Orientation.AMPLIFY_X else -1.0
    block = np.diag([np.exp(sign * r), np.exp(-sign * r)])
    return SymplecticOp(_embed(n_modes, [mode], block))


def rotation_op(n_modes, mode, theta) -> SymplecticOp:
    # e^{i theta} a:  X -> X cos - Y sin,  Y -> X sin + Y cos
    c, s = np.cos(theta), np.sin(theta)
    return SymplecticOp(_embed(n_modes, [mode], np.array([[c, -s], [s, c]])))


def beam_splitter_op(n_modes, mode_i, mode_j, transmissivity=0.5) -> SymplecticOp:
    """Real beam splitter b_i = t a_i + s a_j, b_j = s a_i - t a_j.

    At ``transmissivity=0.5`` this is ``b_i = (a_i + a_j)/sqrt2``,
    ``b_j = (a_i - a_j)/sqrt2``. The map is an involution, and at
    transmissivity 1 it leaves mode i alone and applies a pi phase to mode j.
    """
    if mode_i == mode_j:
        raise ValueError(f"beam splitter needs two distinct modes, got {mode_i} twice")
    if not 0.0 <= transmissivity <= 1.0:
        raise ValueError(f"transmissivity {transmissivity} outside [0, 1]")
    t, s = np.sqrt(transmissivity), np.sqrt(1.0 - transmissivity)
    O = np.array([[t, s], [s, -t]])
    zero = np.zeros((2, 2))
    return SymplecticOp(_embed(n_modes, [mode_i, mode_j], np.block([[O, zero], [zero, O]])))


def network_matrix(U) -> np.ndarray:
    """Real symplectic map of the passive network b = U a."""
    U = np.asarray(U, dtype=complex)
    return np.block([[U.real, -U.imag], [U.imag, U.real]])


def unitarity_error(U) -> float:
    U = np.asarray(U, dtype=complex)
    return float(np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))))


def network_op(U) -> SymplecticOp:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"network matrix must be square, got shape {U.shape}")
    err = unitarity_error(U)
    if err > UNITARY_TOL:
        raise ValueError(f"matrix is not unitary: max |UU^dag - I| = {err:.3e}")
    return SymplecticOp(network_matrix(U))


def opa_op(n_modes, mode, r_gain, amplified="Y") -> SymplecticOp:
    """Phase-sensitive amplifier with amplitude gain ``exp(r_gain)`` on ``amplified``."""
    amplified = str(amplified).upper()
    if amplified not in ("X", "Y"):
        raise ValueError(f"amplified quadrature must be 'X' or 'Y', got {amplified!r}")
    orientation = Orientation.AMPLIFY_X if amplified == "X" else Orientation.AMPLIFY_Y
    return squeezer_op(n_modes, mode, r_gain, orientation)


def opa_gain(r_gain: float) -> float:
    """Amplitude-quadrature gain G = e^{r'}; r'=3 gives ~20 and r'=4.6 gives ~100."""
    return float(np.exp(r_gain))


def squeezing_db(r: float) -> float:
    """Squeezing level in dB below shot noise for parameter ``r``."""
    return float(-10.0 * np.log10(np.exp(-2.0 * r)))


# -- state operations --------------------------------------------------------


def vacuum(n_modes: int) -> GaussianState:
    if int(n_modes) != n_modes or n_modes < 1:
        raise ValueError(f"n_modes must be a positive integer, got {n_modes}")
    n_modes = int(n_modes)
    return GaussianState(n_modes, np.zeros(2 * n_modes), np.eye(2 * n_modes))


def displace(state: GaussianState, mode: int, alpha: float, beta: float) -> GaussianState:
    state._check_mode(mode)
    mean = state.mean.copy()
    mean[state.x(mode)] += alpha
    mean[state.y(mode)] += beta
    return GaussianState(state.n_modes, mean, state.cov)


def squeeze(state, mode, r, orientation=Orientation.AMPLIFY_X) -> GaussianState:
    state._check_mode(mode)
    return squeezer_op(state.n_modes, mode, r, orientation).apply(state)


def phase_shift(state, mode, theta) -> GaussianState:
    state._check_mode(mode)
    return rotation_op(state.n_modes, mode, theta).apply(state)


def beam_splitter(state, mode_i, mode_j, transmissivity=0.5) -> GaussianState:
    state._check_mode(mode_i)
    state._check_mode(mode_j)
    return beam_splitter_op(state.n_modes, mode_i, mode_j, transmissivity).apply(state)


def apply_unitary_network(state, U) -> GaussianState:
    U = np.asarray(U, dtype=complex)
    if U.shape != (state.n_modes, state.n_modes):
        raise ValueError(f"network is {U.shape}, state has {state.n_modes} modes")
    return network_op(U).apply(state)


def opa(state, mode, r_gain, amplified="Y") -> GaussianState:
    state._check_mode(mode)
    return opa_op(state.n_modes, mode, r_gain, amplified).apply(state)


def loss(state, mode, eta, convention=LossConvention.PHYSICAL) -> GaussianState:
    return LossChannel(mode, eta, convention).apply(state)


@dataclass(frozen=True)
class Diagnostics:
    symmetry_deviation: float
    min_eigenvalue: float
    physical: bool
    x_variances: tuple[float, ...]
    y_variances: tuple[float, ...]


def validate(state: GaussianState) -> Diagnostics:
    """Check symmetry and the uncertainty relation cov + i Omega >= 0."""
    cov = np.asarray(state.cov)
    n = state.n_modes
    sym = float(np.max(np.abs(cov - cov.T)))
    try:
        min_eig = float(np.min(np.linalg.eigvalsh(cov + 1j * symplectic_form(n))))
    except np.linalg.LinAlgError:
        min_eig = float("nan")
    diag = np.diag(cov)
    return Diagnostics(
        symmetry_deviation=sym,
        min_eigenvalue=min_eig,
        physical=bool(sym <= SYMMETRY_TOL and min_eig >= -PHYSICAL_TOL),
        x_variances=tuple(float(v) for v in diag[:n]),
        y_variances=tuple(float(v) for v in diag[n:]),
    )


def combination_variance(state: GaussianState, coeffs, normalized=False) -> float:
    """Variance of the linear quadrature combination ``coeffs . q``.

    With ``normalized=True`` the result is divided by the same combination's
    vacuum variance ``|coeffs|^2``, i.e. expressed in shot-noise units.
    """
    c = np.asarray(coeffs, dtype=float)
    var = float(c @ state.cov @ c)
    if normalized:
        var /= float(c @ c)
    return var
