"""Balanced homodyne readouts and phase-estimation sensitivity.

A homodyne current ``I = I_LO [X cos(theta + phi) + Y sin(theta + phi)]`` is a
linear functional of the quadratures, so its moments on a Gaussian state
follow exactly from the state's mean and covariance. A joint readout is a
signed sum of such currents on distinct modes.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

import numpy as np

from . import kernels
from .gaussian import GaussianState, validate


class DegenerateEstimatorError(ValueError):
    """The estimator's mean does not depend on the phase at the working point."""


class Method(str, Enum):
    ANALYTIC = "analytic-slope"
    FINITE_DIFFERENCE = "finite-difference"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class ReadoutTerm:
    """One homodyne detector: ``coeff * I_mode`` measured at angle ``theta + phi``.

    ``estimated`` marks the term whose ``theta`` is the phase being estimated;
    the analytic slope differentiates only those terms.
    """

    mode: int
    coeff: float = 1.0
    theta: float = 0.0
    phi: float = 0.0
    estimated: bool = False


@dataclass(frozen=True)
class HomodyneReadout:
    terms: tuple[ReadoutTerm, ...]
    lo_scale: float = 1.0

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("readout needs at least one term")
        modes = [t.mode for t in terms]
        if len(set(modes)) != len(modes):
            raise ValueError(f"duplicate mode in readout terms: {modes}")
        if not self.lo_scale > 0:
            raise ValueError(f"lo_scale must be positive, got {self.lo_scale}")
        object.__setattr__(self, "terms", terms)

    def scaled(self, factor: float) -> HomodyneReadout:
        return replace(self, lo_scale=self.lo_scale * factor)


@dataclass(frozen=True)
class SensitivityResult:
    sigma: float
    variance: float
    slope: float
    method: Method
    extra: dict = field(default_factory=dict, compare=False)


def readout_vector(readout: HomodyneReadout, n_modes: int) -> np.ndarray:
    w = np.zeros(2 * n_modes)
    for t in readout.terms:
        if not 0 <= t.mode < n_modes:
            raise ValueError(f"readout mode {t.mode} out of range for {n_modes} modes")
        angle = t.theta + t.phi
        w[t.mode] = t.coeff * readout.lo_scale * np.cos(angle)
        w[n_modes + t.mode] = t.coeff * readout.lo_scale * np.sin(angle)
    return w


def readout_derivative(readout: HomodyneReadout, n_modes: int) -> np.ndarray:
    """Derivative of the readout vector with respect to the estimated phase."""
    dw = np.zeros(2 * n_modes)
    for t in readout.terms:
        if not t.estimated:
            continue
        angle = t.theta + t.phi
        dw[t.mode] = -t.coeff * readout.lo_scale * np.sin(angle)
        dw[n_modes + t.mode] = t.coeff * readout.lo_scale * np.cos(angle)
    return dw


def estimator_moments(state: GaussianState, readout: HomodyneReadout) -> tuple[float, float]:
    w = readout_vector(readout, state.n_modes)
    return float(w @ state.mean), float(w @ state.cov @ w)


def _is_degenerate(slope, dw, mean) -> bool:
    return abs(slope) <= 1e-12 * np.linalg.norm(dw) * np.linalg.norm(mean)


def sensitivity(
    state_builder: Callable[[float], GaussianState],
    readout_builder: Callable[[float], HomodyneReadout],
    theta0: float,
    method: Method | str = Method.ANALYTIC,
    delta: float = 1e-6,
    n_samples: int = 1_000_000,
    seed: int = 0,
) -> SensitivityResult:
    """Phase sensitivity sqrt(Var P) / |d<P>/dtheta| at ``theta0``.

    The analytic slope assumes the phase enters only through the readout
    angles (the state builder is evaluated once). Finite differences and the
    Monte-Carlo variance make no such assumption about the slope route.
    """
    method = Method(method)
    state = state_builder(theta0)
    readout = readout_builder(theta0)
    n = state.n_modes
    w = readout_vector(readout, n)
    variance = float(w @ state.cov @ w)

    if method is Method.FINITE_DIFFERENCE:
        if not delta > 0:
            raise ValueError(f"finite-difference step must be positive, got {delta}")
        hi, _ = estimator_moments(state_builder(theta0 + delta), readout_builder(theta0 + delta))
        lo, _ = estimator_moments(state_builder(theta0 - delta), readout_builder(theta0 - delta))
        slope = (hi - lo) / (2 * delta)
        scale = abs(hi) + abs(lo)
        degenerate = abs(hi - lo) <= 1e-13 * scale or scale == 0.0
    else:
        dw = readout_derivative(readout, n)
        slope = float(dw @ state.mean)
        degenerate = _is_degenerate(slope, dw, state.mean)

    extra = {}
    if method is Method.MONTE_CARLO:
        mc = sample_currents(state, readout, n_samples, seed)
        variance = mc.variance
        extra = {"variance_stderr": mc.variance_stderr, "n_samples": n_samples}

    if degenerate:
        raise DegenerateEstimatorError(
            f"d<P>/dtheta vanishes at theta={theta0!r} (slope={slope:.3e})"
        )
    return SensitivityResult(np.sqrt(variance) / abs(slope), variance, slope, method, extra)


def batch_sensitivity(state, readout, amp, noise, threads=1):
    """Sensitivities of one readout over a batch of per-mode loss settings.

    ``state`` is the pre-loss state; ``amp`` and ``noise`` are ``(P, n)``
    per-point loss coefficients (see ``gaussian.loss_coefficients``). Points
    with a vanishing slope get ``nan``. With ``threads > 1`` the batch is
    split into contiguous chunks; results keep the input order.
    """
    n = state.n_modes
    w = readout_vector(readout, n)
    dw = readout_derivative(readout, n)
    amp = np.atleast_2d(np.asarray(amp, dtype=float))
    noise = np.atleast_2d(np.asarray(noise, dtype=float))
    if threads > 1 and len(amp) > 1:
        bounds = np.linspace(0, len(amp), min(threads, len(amp)) + 1).astype(int)
        chunks = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(
                lambda sl: kernels.lossy_moments(state.mean, state.cov, w, dw, amp[sl], noise[sl]),
                chunks,
            ))
        slope = np.concatenate([part[1] for part in parts])
        variance = np.concatenate([part[2] for part in parts])
    else:
        _, slope, variance = kernels.lossy_moments(state.mean, state.cov, w, dw, amp, noise)
    scale = np.linalg.norm(dw) * np.linalg.norm(state.mean) * np.max(np.abs(amp), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma = np.sqrt(variance) / np.abs(slope)
    sigma[np.abs(slope) <= 1e-12 * scale] = np.nan
    return sigma, variance, slope


@dataclass(frozen=True)
class SampleMoments:
    mean: float
    variance: float
    mean_stderr: float
    variance_stderr: float


def sample_currents(state, readout, n_samples, seed) -> SampleMoments:
    """Empirical moments of the readout from ``n_samples`` draws of the state."""
    if n_samples < 2:
        raise ValueError(f"need at least 2 samples, got {n_samples}")
    diag = validate(state)
    if not diag.physical:
        raise ValueError(
            f"covariance is not physical (min eigenvalue {diag.min_eigenvalue:.3e})"
        )
    rng = np.random.default_rng(seed)
    q = rng.multivariate_normal(state.mean, state.cov, size=n_samples, method="eigh")
    p = kernels.projected_samples(q, readout_vector(readout, state.n_modes))
    m = float(p.mean())
    v = float(p.var(ddof=1))
    return SampleMoments(
        mean=m,
        variance=v,
        mean_stderr=float(np.sqrt(v / n_samples)),
        variance_stderr=float(v * np.sqrt(2.0 / (n_samples - 1))),
    )
