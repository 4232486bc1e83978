"""Two-mode EPR scenario: squeeze, 50:50 mix, amplify, phase, loss, joint homodyne.

Both phases are read from the phase-quadrature correlation I1 + I2. The
``sign`` of :class:`EprParams` picks which phase is estimated, matching the
``|beta1 +- beta2|`` branches of the closed form: ``plus`` is phase 1 (slope
from <Y_b1> ~ beta1 + beta2), ``minus`` is phase 2 (slope from
<Y_b2> ~ beta1 - beta2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import EprParams, epr_sensitivity_as_printed
from .gaussian import (
    GaussianState,
    LossConvention,
    Orientation,
    beam_splitter,
    displace,
    loss,
    loss_coefficients,
    opa,
    squeeze,
    vacuum,
)
from .homodyne import (
    DegenerateEstimatorError,
    HomodyneReadout,
    ReadoutTerm,
    SensitivityResult,
    batch_sensitivity,
    sensitivity,
)

VARIANTS = ("with-opa", "without-opa", "snl")


def variant_params(p: EprParams, variant: str) -> EprParams:
    if variant == "with-opa":
        return p
    if variant == "without-opa":
        return p.with_(r3=0.0, r4=0.0)
    if variant == "snl":
        return p.with_(r1=0.0, r2=0.0)
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def preloss_state(p: EprParams) -> GaussianState:
    s = vacuum(2)
    s = squeeze(s, 0, p.r1, Orientation.AMPLIFY_X)
    s = squeeze(s, 1, p.r2, Orientation.AMPLIFY_Y)
    s = displace(s, 0, p.alpha1, p.beta1)
    s = displace(s, 1, p.alpha2, p.beta2)
    s = beam_splitter(s, 0, 1, 0.5)
    s = opa(s, 0, p.r3, "Y")
    return opa(s, 1, p.r4, "Y")


def build_epr_state(p: EprParams, eta_pair=None, convention=LossConvention.PHYSICAL) -> GaussianState:
    eta1, eta2 = (p.eta1, p.eta2) if eta_pair is None else eta_pair
    s = preloss_state(p)
    s = loss(s, 0, eta1, convention)
    return loss(s, 1, eta2, convention)


def epr_readout(p: EprParams, phase: int = 1, readout_sign: float = 1.0, theta=None) -> HomodyneReadout:
    """Joint readout I1 + readout_sign * I2 with phase ``phase`` marked as estimated."""
    theta = p.theta if theta is None else theta
    return HomodyneReadout(
        (
            ReadoutTerm(0, 1.0, theta, p.phi, estimated=phase == 1),
            ReadoutTerm(1, readout_sign, theta, p.phi, estimated=phase == 2),
        ),
        p.lo_scale,
    )


def epr_sensitivity(
    p: EprParams,
    eta_pair=None,
    convention=LossConvention.PHYSICAL,
    sign=None,
    method="analytic-slope",
    readout_sign: float = 1.0,
) -> SensitivityResult:
    sign = p.sign if sign is None else sign
    if sign not in ("plus", "minus"):
        raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
    phase = 1 if sign == "plus" else 2
    state = build_epr_state(p, eta_pair, convention)
    return sensitivity(
        lambda _theta: state,
        lambda theta: epr_readout(p, phase, readout_sign, theta),
        p.theta,
        method,
    )


def epr_average_sensitivity(p: EprParams, eta_pair=None, convention=LossConvention.PHYSICAL) -> float:
    """Arithmetic mean of the phase-1 and phase-2 sensitivities."""
    return 0.5 * (
        epr_sensitivity(p, eta_pair, convention, "plus").sigma
        + epr_sensitivity(p, eta_pair, convention, "minus").sigma
    )


def epr_batch(p: EprParams, etas, convention=LossConvention.PHYSICAL, phase=None, threads=1):
    """Oracle sensitivity over an array of ``(eta1, eta2)`` rows in one kernel call.

    Returns the phase-``phase`` sensitivity, or the two-phase average when
    ``phase`` is None. Degenerate points are ``nan``.
    """
    etas = np.atleast_2d(np.asarray(etas, dtype=float))
    amp, noise = loss_coefficients(etas, convention)
    state = preloss_state(p)
    phases = (1, 2) if phase is None else (phase,)
    sigmas = [batch_sensitivity(state, epr_readout(p, k), amp, noise, threads)[0] for k in phases]
    return np.mean(sigmas, axis=0)


@dataclass(frozen=True)
class EprScenario:
    params: EprParams
    losses: np.ndarray
    convention: LossConvention = LossConvention.PHYSICAL
    columns: tuple = ("with-opa", "without-opa", "snl", "as-printed")

    def __post_init__(self):
        grid = np.asarray(self.losses, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("loss grid must be a non-empty 1D sequence")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("loss grid must be strictly increasing")
        if grid[0] < 0 or grid[-1] > 1:
            raise ValueError(f"losses must lie in [0, 1], got [{grid[0]}, {grid[-1]}]")
        object.__setattr__(self, "losses", grid)
        object.__setattr__(self, "convention", LossConvention(self.convention))


def loss_grid(start=0.0, stop=0.95, step=0.01) -> np.ndarray:
    count = int(round((stop - start) / step)) + 1
    return np.round(start + step * np.arange(count), 12)


def _printed_average(p: EprParams, eta: float) -> float:
    q = p.with_(eta1=eta, eta2=eta)
    try:
        return 0.5 * (
            epr_sensitivity_as_printed(q.with_(sign="plus"))
            + epr_sensitivity_as_printed(q.with_(sign="minus"))
        )
    except DegenerateEstimatorError:
        return float("nan")


def sweep_epr(scenario: EprScenario, threads: int = 1) -> dict[str, np.ndarray]:
    """Average two-phase sensitivity versus common loss for each requested column."""
    p = scenario.params
    eta = 1.0 - scenario.losses
    etas = np.column_stack([eta, eta])
    table = {"loss": scenario.losses.copy()}
    names = {"with-opa": "sigma_opa", "without-opa": "sigma_noopa", "snl": "sigma_snl"}
    for variant, col in names.items():
        if variant in scenario.columns:
            table[col] = epr_batch(variant_params(p, variant), etas, scenario.convention, threads=threads)
    if "as-printed" in scenario.columns:
        table["sigma_printed"] = np.array([_printed_average(p, e) for e in eta])
    return table
