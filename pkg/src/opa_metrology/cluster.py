"""Four-mode square cluster: squeezed inputs, passive network, per-phase OPA, joint homodyne.

Each of the four phases is estimated from its own nullifier
``Y_k - X_i - X_j``. For phase k a fresh copy of the cluster is amplified with
the Y quadrature gained on mode k and the X quadratures gained on modes i and
j, then read out with ``I_k - I_i - I_j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .analytic import ClusterParams, cluster_sensitivity_as_printed
from .gaussian import (
    GaussianState,
    LossConvention,
    Orientation,
    apply_unitary_network,
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
    estimator_moments,
    sensitivity,
)

_a, _b = 1 / sqrt(2), 1 / sqrt(10)
CLUSTER_U = np.array(
    [
        [-_a, -_b, -2j * _b, 0],
        [_a, -_b, -2j * _b, 0],
        [0, -2j * _b, -_b, -_a],
        [0, -2j * _b, -_b, _a],
    ]
)

Y_ANGLE = np.pi / 2


@dataclass(frozen=True)
class NullifierSpec:
    """``Y_minuend - X_s1 - X_s2`` and its printed input-quadrature coefficients."""

    k: int
    minuend: int
    subtrahends: tuple[int, int]
    coefficients: dict

    @property
    def modes(self) -> tuple[int, ...]:
        return (self.minuend, *self.subtrahends)


_c5 = sqrt(5) / sqrt(2)
NULLIFIERS = {
    1: NullifierSpec(1, 0, (2, 3), {0: -_a, 1: -_c5}),
    2: NullifierSpec(2, 1, (2, 3), {0: _a, 1: -_c5}),
    3: NullifierSpec(3, 2, (0, 1), {2: -_c5, 3: -_a}),
    4: NullifierSpec(4, 3, (0, 1), {2: -_c5, 3: _a}),
}

VARIANTS = ("with-opa", "without-opa", "snl")


def variant_params(p: ClusterParams, variant: str) -> ClusterParams:
    if variant == "with-opa":
        return p
    if variant == "without-opa":
        return p.with_(r_prime=0.0)
    if variant == "snl":
        return p.with_(r=0.0)
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def _spec(k: int) -> NullifierSpec:
    if k not in NULLIFIERS:
        raise ValueError(f"phase index must be 1..4, got {k}")
    return NULLIFIERS[k]


def build_cluster(p: ClusterParams) -> GaussianState:
    s = vacuum(4)
    for m in range(4):
        s = squeeze(s, m, p.r, Orientation.AMPLIFY_X)
        s = displace(s, m, p.alpha[m], p.beta[m])
    return apply_unitary_network(s, CLUSTER_U)


def nullifier_readout(spec: NullifierSpec, theta=0.0, lo_scale=1.0) -> HomodyneReadout:
    """Readout I_k - I_i - I_j, measuring Y on the minuend and X on the others."""
    terms = [ReadoutTerm(spec.minuend, 1.0, theta, Y_ANGLE, estimated=True)]
    terms += [ReadoutTerm(m, -1.0, theta, 0.0) for m in spec.subtrahends]
    return HomodyneReadout(tuple(terms), lo_scale)


def nullifier_check(state: GaussianState, spec: NullifierSpec) -> float:
    """Raw variance of the nullifier combination."""
    return estimator_moments(state, nullifier_readout(spec))[1]


def amplified_cluster(k: int, p: ClusterParams) -> GaussianState:
    spec = _spec(k)
    s = opa(build_cluster(p), spec.minuend, p.r_prime, "Y")
    for m in spec.subtrahends:
        s = opa(s, m, p.r_prime, "X")
    return s


def phase_sensitivity(
    k: int, p: ClusterParams, eta_vec=None, convention=LossConvention.PHYSICAL, method="analytic-slope"
) -> SensitivityResult:
    spec = _spec(k)
    eta_vec = p.eta if eta_vec is None else tuple(eta_vec)
    s = amplified_cluster(k, p)
    for m in range(4):
        s = loss(s, m, eta_vec[m], convention)
    return sensitivity(
        lambda _theta: s,
        lambda theta: nullifier_readout(spec, theta, p.lo_scale),
        p.theta,
        method,
    )


def average_sensitivity(p: ClusterParams, eta_vec=None, convention=LossConvention.PHYSICAL) -> float:
    return float(np.mean([phase_sensitivity(k, p, eta_vec, convention).sigma for k in (1, 2, 3, 4)]))


def cluster_batch(p: ClusterParams, etas, convention=LossConvention.PHYSICAL, phases=(1, 2, 3, 4), threads=1):
    """Per-phase oracle sensitivities over ``(P, 4)`` transmissivity rows.

    Returns an array of shape ``(len(phases), P)``; degenerate points are nan.
    """
    etas = np.atleast_2d(np.asarray(etas, dtype=float))
    amp, noise = loss_coefficients(etas, convention)
    out = []
    for k in phases:
        readout = nullifier_readout(_spec(k), p.theta, p.lo_scale)
        out.append(batch_sensitivity(amplified_cluster(k, p), readout, amp, noise, threads)[0])
    return np.array(out)


def _printed(p: ClusterParams, etas, indices="printed"):
    out = np.empty((4, len(etas)))
    for i, row in enumerate(etas):
        q = p.with_(eta=tuple(row))
        for k in (1, 2, 3, 4):
            try:
                out[k - 1, i] = cluster_sensitivity_as_printed(k, q, indices)
            except DegenerateEstimatorError:
                out[k - 1, i] = np.nan
    return out


@dataclass(frozen=True)
class ClusterScenario:
    """Sweep description: a 1D common-loss grid or a 2D grid over two modes.

    For 2D sweeps ``modes`` names the two swept modes (1-based) and
    ``fixed_eta`` gives the transmissivity of every mode; entries for the swept
    modes are ignored.
    """

    params: ClusterParams
    losses: np.ndarray
    convention: LossConvention = LossConvention.PHYSICAL
    modes: tuple | None = None
    losses2: np.ndarray | None = None
    fixed_eta: tuple = (0.5, 0.5, 0.5, 0.5)
    columns: tuple = ("with-opa", "without-opa", "snl", "as-printed")

    def __post_init__(self):
        for name in ("losses", "losses2"):
            grid = getattr(self, name)
            if grid is None:
                continue
            grid = np.asarray(grid, dtype=float)
            if grid.ndim != 1 or grid.size == 0:
                raise ValueError(f"{name} must be a non-empty 1D sequence")
            if np.any(np.diff(grid) <= 0):
                raise ValueError(f"{name} must be strictly increasing")
            if grid[0] < 0 or grid[-1] > 1:
                raise ValueError(f"{name} must lie in [0, 1]")
            object.__setattr__(self, name, grid)
        if self.modes is not None:
            modes = tuple(int(m) for m in self.modes)
            if len(modes) != 2 or modes[0] == modes[1] or not all(1 <= m <= 4 for m in modes):
                raise ValueError(f"2D sweep needs two distinct modes in 1..4, got {self.modes}")
            object.__setattr__(self, "modes", modes)
            if self.losses2 is None:
                object.__setattr__(self, "losses2", self.losses)
        object.__setattr__(self, "convention", LossConvention(self.convention))

    def eta_rows(self) -> tuple[np.ndarray, np.ndarray]:
        """Loss coordinates and matching ``(P, 4)`` transmissivity rows."""
        if self.modes is None:
            eta = 1.0 - self.losses
            return self.losses[:, None], np.repeat(eta[:, None], 4, axis=1)
        l1, l2 = np.meshgrid(self.losses, self.losses2, indexing="ij")
        coords = np.column_stack([l1.ravel(), l2.ravel()])
        rows = np.tile(np.asarray(self.fixed_eta, dtype=float), (len(coords), 1))
        rows[:, self.modes[0] - 1] = 1.0 - coords[:, 0]
        rows[:, self.modes[1] - 1] = 1.0 - coords[:, 1]
        return coords, rows


def _sweep(scenario: ClusterScenario, per_phase: bool, threads: int = 1) -> dict[str, np.ndarray]:
    p = scenario.params
    coords, rows = scenario.eta_rows()
    table = {}
    if scenario.modes is None:
        table["loss"] = coords[:, 0].copy()
    else:
        table["loss1"], table["loss2"] = coords[:, 0].copy(), coords[:, 1].copy()
    results = {}
    for variant, tag in (("with-opa", "opa"), ("without-opa", "noopa"), ("snl", "snl")):
        if variant in scenario.columns:
            results[tag] = cluster_batch(variant_params(p, variant), rows, scenario.convention, threads=threads)
    if "as-printed" in scenario.columns:
        results["printed"] = _printed(p, rows)
    if per_phase:
        for tag, sig in results.items():
            table[f"sigma1_{tag}"] = sig[0]
    for tag, sig in results.items():
        table[f"sigma_ave_{tag}"] = sig.mean(axis=0)
    return table


def sweep_cluster_1d(scenario: ClusterScenario, threads: int = 1) -> dict[str, np.ndarray]:
    if scenario.modes is not None:
        raise ValueError("sweep_cluster_1d needs a scenario without swept modes")
    return _sweep(scenario, per_phase=True, threads=threads)


def sweep_cluster_2d(scenario: ClusterScenario, threads: int = 1) -> dict[str, np.ndarray]:
    if scenario.modes is None:
        raise ValueError("sweep_cluster_2d needs two swept modes")
    return _sweep(scenario, per_phase=False, threads=threads)
