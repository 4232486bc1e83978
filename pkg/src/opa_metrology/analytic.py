"""Closed-form sensitivities and correlations, evaluated exactly as written.

These expressions are kept verbatim (including their inconsistencies) so they
can be compared with the exact moment propagation in ``epr`` and ``cluster``.
They are not used as ground truth anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import exp, radians, sqrt

from .homodyne import DegenerateEstimatorError

SQ2 = sqrt(2.0)
SQ10 = sqrt(10.0)


@dataclass(frozen=True)
class EprParams:
    """Two-mode scenario: squeezers r1, r2, OPA gains r3, r4, phase offsets beta."""

    r1: float = 1.0
    r2: float = 1.0
    r3: float = 4.6
    r4: float = 4.6
    eta1: float = 1.0
    eta2: float = 1.0
    alpha1: float = 0.0
    alpha2: float = 0.0
    beta1: float = 1.0
    beta2: float = 5.0
    theta: float = radians(1.5)
    phi: float = radians(90.0)
    sign: str = "plus"
    lo_scale: float = 1.0

    def __post_init__(self):
        for name in ("eta1", "eta2"):
            eta = getattr(self, name)
            if not 0.0 <= eta <= 1.0:
                raise ValueError(f"{name}={eta} outside [0, 1]")
        if self.sign not in ("plus", "minus"):
            raise ValueError(f"sign must be 'plus' or 'minus', got {self.sign!r}")

    def with_(self, **changes) -> EprParams:
        return replace(self, **changes)


def _vec4(v, name):
    v = tuple(float(x) for x in v)
    if len(v) != 4:
        raise ValueError(f"{name} needs 4 entries, got {len(v)}")
    return v


@dataclass(frozen=True)
class ClusterParams:
    """Four-mode square-cluster scenario with common squeezing ``r`` and OPA gain ``r_prime``.

    ``alpha`` and ``beta`` hold the amplitude and phase displacements of the
    four input modes (mode 1 first).
    """

    r: float = 1.0
    r_prime: float = 3.0
    eta: tuple = (1.0, 1.0, 1.0, 1.0)
    alpha: tuple = (0.0, 0.0, 2.0, 0.0)
    beta: tuple = (1.0, 2.0, 0.0, 0.0)
    theta: float = radians(1.5)
    lo_scale: float = 1.0

    def __post_init__(self):
        eta = _vec4(self.eta, "eta")
        for i, e in enumerate(eta):
            if not 0.0 <= e <= 1.0:
                raise ValueError(f"eta[{i}]={e} outside [0, 1]")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "alpha", _vec4(self.alpha, "alpha"))
        object.__setattr__(self, "beta", _vec4(self.beta, "beta"))

    def with_(self, **changes) -> ClusterParams:
        return replace(self, **changes)


# -- two-mode ------------------------------------------------------------------


def epr_correlation_variance(r1: float, r2: float) -> tuple[float, float]:
    """Shot-noise-normalized Var(X_b1 - X_b2) and Var(Y_b1 + Y_b2)."""
    return exp(-2 * r2), exp(-2 * r1)


def epr_sensitivity_as_printed(p: EprParams) -> float:
    e1, e2 = p.eta1, p.eta2
    beta = p.beta1 + p.beta2 if p.sign == "plus" else p.beta1 - p.beta2
    radicand = (
        (e1**2 + e2**2) * (exp(-2 * p.r1) + exp(2 * p.r2))
        + 2 * e1 * e2 * (exp(-2 * p.r1) - exp(2 * p.r2))
        + ((1 - e1**2) + (1 - e2**2)) * exp(-2 * p.r3)
    )
    denom = e1 * p.theta * abs(beta) / SQ2
    if denom == 0.0:
        raise DegenerateEstimatorError("printed two-mode denominator eta1*theta*|beta1 +- beta2| is zero")
    return sqrt(radicand) / denom


# -- four-mode -----------------------------------------------------------------

# Modes whose (1 - eta)^2 vacuum terms appear in each printed four-mode formula,
# and the set the joint readout for that phase actually touches.
PRINTED_VACUUM_MODES = {1: (1, 3, 4), 2: (1, 2, 3), 3: (1, 2, 3), 4: (1, 2, 4)}
READOUT_MODES = {1: (1, 3, 4), 2: (2, 3, 4), 3: (1, 2, 3), 4: (1, 2, 4)}


def _cluster_denominator(k, p: ClusterParams) -> float:
    a1, a2, a3, a4 = p.alpha
    b1, b2, b3, b4 = p.beta
    if k == 1:
        return b1 / SQ2 + b2 / SQ10 + 2 * a3 / SQ10
    if k == 2:
        return b1 / SQ2 - b2 / SQ10 - 2 * a3 / SQ10
    if k == 3:
        return 2 * a2 / SQ10 + b2 / SQ10 + b4 / SQ2
    return 2 * a2 / SQ10 + b2 / SQ10 - b4 / SQ2


def cluster_sensitivity_as_printed(k: int, p: ClusterParams, indices: str = "printed") -> float:
    """Printed sensitivity of phase ``k`` (1..4) of the square cluster.

    ``indices="corrected"`` swaps in the vacuum-term modes that the phase-k
    readout really uses; only the phase-2 formula changes. The printed
    denominators carry no absolute value, the magnitude is returned.
    """
    if k not in (1, 2, 3, 4):
        raise ValueError(f"phase index must be 1..4, got {k}")
    if indices not in ("printed", "corrected"):
        raise ValueError(f"indices must be 'printed' or 'corrected', got {indices!r}")
    e1, e2, e3, e4 = p.eta
    r, rp = p.r, p.r_prime
    if k == 1:
        sq = 0.5 * e1**2 + (e1 + 2 * e3 + 2 * e4) ** 2 / 10
        anti = (2 * e1 - e3 - e4) ** 2 / 10 + 0.5 * (e3 - e4) ** 2
    elif k == 2:
        sq = 0.5 * e2**2 + (e2 + 2 * e3 + 2 * e4) ** 2 / 10
        anti = (2 * e2 - e3 - e4) ** 2 / 10 + 0.5 * (e3 - e4) ** 2
    elif k == 3:
        sq = 0.5 * e3**2 + (2 * e1 + 2 * e2 + e3) ** 2 / 10
        anti = (e1 + e2 - 2 * e3) ** 2 / 10 + 0.5 * (e1 - e2) ** 2
    else:
        sq = 0.5 * e4**2 + (2 * e1 + 2 * e2 + e4) ** 2 / 10
        anti = (e1 + e2 - 2 * e4) ** 2 / 10 + 0.5 * (e1 - e2) ** 2
    modes = PRINTED_VACUUM_MODES[k] if indices == "printed" else READOUT_MODES[k]
    vac = sum((1 - p.eta[m - 1]) ** 2 for m in modes)
    radicand = exp(-2 * r) * sq + exp(2 * r) * anti + exp(-2 * rp) * vac
    denom = p.theta * p.eta[k - 1] * _cluster_denominator(k, p)
    if denom == 0.0:
        raise DegenerateEstimatorError(f"printed denominator for phase {k} is zero")
    return sqrt(radicand) / abs(denom)


def nullifier_variance_as_printed(k: int, r1: float, r2: float, r3: float, r4: float) -> float:
    """Variance of nullifier ``k`` implied by the printed right-hand sides.

    The input quadratures on the right are taken as unit-variance vacuum, so
    the printed exponential prefactors carry all the squeezing.
    """
    if k in (1, 2):
        return 0.5 * exp(-2 * r1) + 2.5 * exp(-2 * r2)
    if k in (3, 4):
        return 2.5 * exp(-2 * r3) + 0.5 * exp(-2 * r4)
    raise ValueError(f"nullifier index must be 1..4, got {k}")


# -- shot-noise references -------------------------------------------------------


def snl_reference(scenario: str, params, eta=None, convention="physical", phase=None) -> float:
    """Oracle sensitivity with all initial squeezing removed and the OPA kept.

    ``scenario`` is ``"epr"`` or ``"cluster"``. Without ``phase`` the average
    over the scenario's phases is returned.
    """
    if scenario == "epr":
        from .epr import epr_average_sensitivity, epr_sensitivity

        snl = params.with_(r1=0.0, r2=0.0)
        if phase is None:
            return epr_average_sensitivity(snl, eta, convention)
        sign = "plus" if phase == 1 else "minus"
        return epr_sensitivity(snl, eta, convention, sign).sigma
    if scenario == "cluster":
        from .cluster import average_sensitivity, phase_sensitivity

        snl = params.with_(r=0.0)
        if phase is None:
            return average_sensitivity(snl, eta, convention)
        return phase_sensitivity(phase, snl, eta, convention).sigma
    raise ValueError(f"unknown scenario {scenario!r}; expected 'epr' or 'cluster'")


# -- discrepancy report ------------------------------------------------------------


@dataclass(frozen=True)
class Discrepancy:
    topic: str
    printed: str
    oracle: str
    numbers: dict = field(default_factory=dict, compare=False)


def discrepancies(epr: EprParams | None = None, cluster: ClusterParams | None = None) -> list[Discrepancy]:
    """Known differences between the printed closed forms and the exact model.

    Each entry carries printed/oracle ratios at a few loss values so the size
    of the difference is visible, not only its existence.
    """
    from .cluster import phase_sensitivity
    from .epr import epr_sensitivity

    if epr is None and cluster is None:
        epr = EprParams()
        cluster = ClusterParams(alpha=(0.0, 1.0, 2.0, 0.0), beta=(1.0, 2.0, 0.0, 3.0))
    out = []
    if epr is not None:
        out += _epr_discrepancies(epr, epr_sensitivity)
    if cluster is not None:
        out += _cluster_discrepancies(cluster, phase_sensitivity)
    return out


def _epr_discrepancies(epr, epr_sensitivity):
    out = []
    ratios = {}
    for eta in (1.0, 0.5, 0.1):
        p = epr.with_(eta1=eta, eta2=eta, sign="plus")
        ratios[f"eta={eta}"] = epr_sensitivity_as_printed(p) / epr_sensitivity(p, (eta, eta)).sigma
    out.append(Discrepancy(
        "two-mode slope and normalization",
        "denominator eta1*theta*|beta1+-beta2|/sqrt2 (no OPA gain, bare theta); "
        "radicand twice the raw readout variance with OPA gain divided out",
        "slope = sqrt(eta1)*exp(r3)*sin(theta)*|<Y_b>|; the OPA gain cancels in the ratio; "
        "printed/oracle = sqrt2*sin(theta)/theta at eta=1, drifting with loss",
        ratios,
    ))
    out.append(Discrepancy(
        "two-mode vacuum weights",
        "(1 - eta^2) vacuum terms, while the four-mode formulas use (1 - eta)^2",
        "physical loss adds (1 - eta) vacuum variance per mode",
    ))
    out.append(Discrepancy(
        "two-mode phase-2 loss factor",
        "denominator uses eta1 for both phases",
        "phase 2 slope scales with sqrt(eta2)",
    ))
    return out


def _cluster_discrepancies(cluster, phase_sensitivity):
    out = []
    ratios = {}
    for eta in (1.0, 0.5, 0.1):
        p = cluster.with_(eta=(eta,) * 4)
        ratios[f"eta={eta}"] = {k: _ratio(k, p, phase_sensitivity) for k in (1, 2, 3, 4)}
    out.append(Discrepancy(
        "four-mode slope",
        "denominator theta_k*eta_k*(displacement combination)",
        "slope = sqrt(eta_k)*exp(r')*sin(theta)*|<Y_bk>| plus a deamplified X term",
        ratios,
    ))
    out.append(Discrepancy(
        "four-mode vacuum indices",
        "phase-2 vacuum terms list modes (1, 2, 3)",
        "the I2 - I3 - I4 readout touches modes (2, 3, 4); use indices='corrected'",
    ))
    out.append(Discrepancy(
        "four-mode phase-3/4 displacement",
        "denominators contain beta2/sqrt10",
        "<Y_b3> and <Y_b4> depend on beta3, not beta2 (U row 3/4 acts on a3 with -1/sqrt10)",
    ))
    return out


def _ratio(k, p, phase_sensitivity):
    try:
        return cluster_sensitivity_as_printed(k, p) / phase_sensitivity(k, p, p.eta).sigma
    except DegenerateEstimatorError:
        return float("nan")


def format_report(items: list[Discrepancy]) -> str:
    lines = []
    for d in items:
        lines.append(f"[{d.topic}]")
        lines.append(f"  printed: {d.printed}")
        lines.append(f"  model:   {d.oracle}")
        for key, val in d.numbers.items():
            if isinstance(val, dict):
                val = ", ".join(f"phase {k}: {v:.6g}" for k, v in val.items())
            else:
                val = f"{val:.6g}"
            lines.append(f"  printed/model at {key}: {val}")
    return "\n".join(lines) + "\n"
