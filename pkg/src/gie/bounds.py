"""Analytic separability and entanglement bounds for the gravitational channel.

Everything here is closed-form: the positive-semidefiniteness test of the
noise-vs-rotation matrix (lossless and lossy), the universal threshold
g_G > 2 gamma_m N_th, the finite-squeezing condition, entanglement-annihilating
and entanglement-breaking conditions, the loss-modified bound with its optimal
input squeezing, the witness construction for the converse direction, and the
conversion from SI quantities to the dimensionless channel parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# CODATA 2018
G_NEWTON = 6.67430e-11  # m^3 kg^-1 s^-2
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K

# Stand-in for "infinite squeezing": e^{-2*20} < 1e-17 is machine-negligible.
ZETA_SENTINEL = 20.0

SEPARABILITY_MARGIN_TOL = 1e-12


@dataclass(frozen=True)
class OmegaComponents:
    """Components of the channel's noise-vs-rotation matrix.

    The 4x4 Hermitian matrix has eigenvalues o1 +/- sqrt(o2^2 + o3^2), each
    twice; it is positive semidefinite iff o1 >= sqrt(o2^2 + o3^2), in which
    case every separable two-mode Gaussian input stays separable.
    """

    o1: float
    o2: float
    o3: float
    lossy: bool = False
    eta: float = 1.0


@dataclass(frozen=True)
class BoundReport:
    """All separability verdicts at one parameter point."""

    theta: float
    damping: float
    n_th: float
    eta: float
    universal_margin: float  # (g_G - 2 gamma_m N_th) in units of g_G
    separability_preserved: bool
    ea: bool
    eb: bool
    lossy_margin: float
    finite_squeezing_ok: bool | None = None

    CSV_HEADER = "theta,damping,n_th,eta,universal_margin,sep_preserved,ea,eb,lossy_margin"

    def csv_row(self) -> str:
        vals = [
            f"{self.theta:.17g}",
            f"{self.damping:.17g}",
            f"{self.n_th:.17g}",
            f"{self.eta:.17g}",
            f"{self.universal_margin:.17g}",
            "1" if self.separability_preserved else "0",
            "1" if self.ea else "0",
            "1" if self.eb else "0",
            f"{self.lossy_margin:.17g}",
        ]
        return ",".join(vals)


@dataclass(frozen=True)
class PhysicalParams:
    """SI-ish experimental knobs (mass_density in g/cm^3, the rest SI)."""

    mass_density: float  # M / d^3 in g/cm^3
    omega_m: float  # mechanical angular frequency, rad/s
    gamma_m: float  # damping rate (HWHM), rad/s
    temperature: float  # K
    t_g: float  # gravitational interaction time, s

    def __post_init__(self):
        for name in ("mass_density", "omega_m", "gamma_m", "temperature", "t_g"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class DimensionlessPoint:
    """Channel parameters derived from PhysicalParams."""

    g_g: float  # rad/s
    n_th: float
    theta: float  # g_G * t_G
    damping: float  # gamma_m * t_G
    q_m: float  # omega_m / (2 gamma_m)

    @property
    def ratio(self) -> float:
        """g_G / (2 gamma_m N_th)."""
        return self.theta / (2.0 * self.damping * self.n_th)


def omega_components(theta: float, damping: float, n_th: float, eta: float = 1.0) -> OmegaComponents:
    """Noise-vs-rotation components, lossless (eta = 1) or lossy.

    Lossless: o1 = 2 N_th (e^{2d} - 1), o2 = e^{2d} cos 2theta - 1,
    o3 = e^{2d} sin 2theta.  Lossy readout divides the rotation part by eta
    and adds the vacuum noise (1 - eta) e^{2d} / eta to o1.
    """
    if damping < 0 or n_th < 0:
        raise ValueError("damping and n_th must be >= 0")
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    e2d = math.exp(2.0 * damping)
    o1 = 2.0 * n_th * math.expm1(2.0 * damping)
    o2 = e2d * math.cos(2.0 * theta) - 1.0
    o3 = e2d * math.sin(2.0 * theta)
    if eta == 1.0:
        return OmegaComponents(o1=o1, o2=o2, o3=o3, lossy=False, eta=1.0)
    scale = (1.0 - eta) / eta
    return OmegaComponents(
        o1=o1 + e2d * scale,
        o2=(e2d * math.cos(2.0 * theta)) / eta - 1.0,
        o3=(e2d * math.sin(2.0 * theta)) / eta,
        lossy=True,
        eta=eta,
    )


def separability_preserved(oc: OmegaComponents) -> tuple[bool, float]:
    """Verdict and margin o1 - sqrt(o2^2 + o3^2).

    Nonnegative margin guarantees every separable two-mode Gaussian input
    stays separable.  The converse (a negative margin implies some separable
    input becomes entangled) is proven only for o2 >= 0; for o2 < 0 the
    verdict is sufficient-only.
    """
    margin = oc.o1 - math.hypot(oc.o2, oc.o3)
    return margin >= -SEPARABILITY_MARGIN_TOL, margin


def universal_threshold_margin(g_g: float, gamma_m: float, n_th: float) -> float:
    """g_G - 2 gamma_m N_th, in the same units as the inputs."""
    if g_g < 0 or gamma_m < 0 or n_th < 0:
        raise ValueError("rates must be >= 0")
    return g_g - 2.0 * gamma_m * n_th


def finite_squeezing_condition(zeta: float, theta: float, thermal: float) -> bool:
    """Whether squeezing zeta generates entanglement at this thermal level.

    True iff 4 * thermal < sqrt(cosh^2 2z + 2 |sinh 2z sin 2theta|) - cosh 2z,
    evaluated in the cancellation-free form 2 s S / (sqrt(c^2 + 2 s S) + c).
    The right side grows monotonically with |zeta| toward |sin 2theta|.
    """
    c = math.cosh(2.0 * zeta)
    s = abs(math.sinh(2.0 * zeta))
    big_s = abs(math.sin(2.0 * theta))
    rhs = 2.0 * s * big_s / (math.sqrt(c * c + 2.0 * s * big_s) + c)
    return 4.0 * thermal < rhs


def ea_eb_conditions(damping: float, n_th: float, weak_eb: bool = False) -> tuple[bool, bool]:
    """Entanglement-annihilating and entanglement-breaking verdicts.

    EA uses the weak-dissipation form 4 * damping * n_th >= 1 (every Gaussian
    input, however entangled, exits separable).  EB defaults to the exact form
    2 tanh(damping) n_th >= 1 (output separable from any ancilla); weak_eb
    switches to the small-damping approximation 2 * damping * n_th >= 1.
    EB implies EA.
    """
    if damping < 0 or n_th < 0:
        raise ValueError("damping and n_th must be >= 0")
    ea = 4.0 * damping * n_th >= 1.0
    if weak_eb:
        eb = 2.0 * damping * n_th >= 1.0
    else:
        eb = 2.0 * math.tanh(damping) * n_th >= 1.0
    return ea, eb


def lossy_bound_margin(theta: float, thermal: float, eta: float) -> float:
    """Margin of the loss-modified separability-preservation bound.

    margin = 4 eta thermal - (sqrt((1-eta)^2 + 4 eta sin^2 theta) - (1-eta));
    nonnegative margin means no input squeezing can make entanglement visible
    after readout loss eta in the proven regime.  At eta = 1 this reduces to
    4 thermal - 2 |sin theta|.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if thermal < 0:
        raise ValueError(f"thermal must be >= 0, got {thermal}")
    root = math.hypot(1.0 - eta, 2.0 * math.sqrt(eta) * abs(math.sin(theta)))
    return 4.0 * eta * thermal - (root - (1.0 - eta))


def optimal_squeezing(theta: float, eta: float) -> tuple[float, bool]:
    """Input squeezing that maximizes tolerable thermal noise under loss.

    |tanh 2 zeta*| = 2|theta| / sqrt((1-eta)^2 + 4 eta theta^2), valid for
    theta << 1.  Returns (zeta_star, finite).  When the argument reaches 1
    (eta = 1, or 4 theta^2 >= 1 - eta) the optimum runs away to infinite
    squeezing and the sentinel value 20 is returned with finite = False.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if eta == 1.0:
        return ZETA_SENTINEL, False
    if theta == 0.0:
        return 0.0, True
    t = 2.0 * abs(theta) / math.hypot(1.0 - eta, 2.0 * math.sqrt(eta) * abs(theta))
    if t >= 1.0:
        return ZETA_SENTINEL, False
    return 0.5 * math.atanh(t), True


def witness_squeezing(oc: OmegaComponents) -> float | None:
    """Squeezing whose equally squeezed input becomes entangled.

    Requires a violated bound (o1 < sqrt(o2^2 + o3^2)); raises otherwise.
    Within the proven regime o2 >= 0: returns ln(o2 / (o1 - |o3|)) / 2 when
    o1 > |o3| and the large-squeezing sentinel 20 when o1 <= |o3|.  For
    o2 < 0 no witness is constructed (returns None): the bound is
    sufficient-only there.
    """
    _, margin = separability_preserved(oc)
    if margin >= 0.0:
        raise ValueError(f"bound is not violated (margin {margin:g} >= 0); no witness exists")
    if oc.o2 < 0.0:
        return None
    gap = oc.o1 - abs(oc.o3)
    if gap <= 0.0:
        return ZETA_SENTINEL
    return 0.5 * math.log(oc.o2 / gap)


def physical_to_dimensionless(pp: PhysicalParams) -> DimensionlessPoint:
    """Convert experimental parameters to the channel's dimensionless knobs.

    g_G = G (M/d^3) / omega_m with the density converted from g/cm^3,
    N_th = k_B T / (hbar omega_m), theta = g_G t_G, damping = gamma_m t_G,
    Q_m = omega_m / (2 gamma_m).
    """
    density_si = pp.mass_density * 1000.0  # g/cm^3 -> kg/m^3
    g_g = G_NEWTON * density_si / pp.omega_m
    n_th = K_B * pp.temperature / (HBAR * pp.omega_m)
    return DimensionlessPoint(
        g_g=g_g,
        n_th=n_th,
        theta=g_g * pp.t_g,
        damping=pp.gamma_m * pp.t_g,
        q_m=pp.omega_m / (2.0 * pp.gamma_m),
    )


def bound_report(
    theta: float,
    damping: float,
    n_th: float,
    eta: float = 1.0,
    zeta: float | None = None,
) -> BoundReport:
    """Evaluate every bound at one parameter point."""
    thermal = damping * n_th
    if theta != 0.0:
        universal = 1.0 - 2.0 * thermal / abs(theta)
    else:
        universal = math.nan
    preserved, _ = separability_preserved(omega_components(theta, damping, n_th))
    ea, eb = ea_eb_conditions(damping, n_th)
    lossy = lossy_bound_margin(theta, thermal, eta)
    fs_ok = None if zeta is None else finite_squeezing_condition(zeta, theta, thermal)
    return BoundReport(
        theta=theta,
        damping=damping,
        n_th=n_th,
        eta=eta,
        universal_margin=universal,
        separability_preserved=preserved,
        ea=ea,
        eb=eb,
        lossy_margin=lossy,
        finite_squeezing_ok=fs_ok,
    )


def _rotation(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


def sample_separable_covariance(rng: np.random.Generator, max_components: int = 8) -> np.ndarray:
    """Random covariance matrix of an explicitly separable two-mode state.

    Convex mixture of <= max_components products of squeezed, rotated thermal
    single-mode states, plus the classical correlations contributed by the
    spread of the component means.  The result always satisfies the
    partial-transpose uncertainty relation, which is all the
    separability-preservation theorem requires of its inputs.
    """
    k = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(k))
    means = rng.normal(scale=1.0, size=(k, 4))
    v = np.zeros((4, 4))
    for i in range(k):
        blocks = []
        for _ in range(2):
            nu = rng.uniform(1.0, 3.0)
            s = rng.uniform(0.0, 0.8)
            rot = _rotation(rng.uniform(0.0, 2.0 * math.pi))
            blocks.append(nu * rot @ np.diag([math.exp(2 * s), math.exp(-2 * s)]) @ rot.T)
        comp = np.zeros((4, 4))
        comp[:2, :2] = blocks[0]
        comp[2:, 2:] = blocks[1]
        v += weights[i] * (comp + np.outer(means[i], means[i]))
    mean = weights @ means
    v -= np.outer(mean, mean)
    return 0.5 * (v + v.T)
