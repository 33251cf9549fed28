"""Two-mode Gaussian pipeline for the gravitational beam-splitter channel.

Quadrature convention: X = xi + xi^dag, Y = (xi - xi^dag)/i, so [X, Y] = 2i
and the vacuum covariance matrix is the 4x4 identity.  Mode ordering is
(X_A, Y_A, X_B, Y_B).  First moments are not tracked: every quantity computed
here is displacement-invariant.

The channel maps V -> M V M^T + V_th, where M encodes the two optical state
swaps plus the damped gravitational beam-splitter rotation, and
V_th = 2 (1 - e^{-2 d}) N_th * I is the accumulated mechanical thermal noise
(high-temperature form: the vacuum half-quantum of the bath is not included,
so the map is only physical for N_th >= 1/2 or d = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NumericalConsistencyError

# Tolerance below which |nu_minus - 1| is treated as "on the separability
# threshold" by consumers (sweeps flag such points rather than classifying).
NU_THRESHOLD_TOL = 1e-10

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9

# Real symplectic form J (+) J for [X, Y] = 2i, and its Hermitian companion
# i*Omega = (-sigma_y) (+) (-sigma_y): V is a physical covariance matrix iff
# V + SIGMA_HERM >= 0.
OMEGA_SYM = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)
SIGMA_HERM = 1j * OMEGA_SYM

# Partial transpose of mode B in phase space: Y_B -> -Y_B.
PARTIAL_TRANSPOSE = np.diag([1.0, 1.0, 1.0, -1.0])


@dataclass(frozen=True)
class ChannelParams:
    """Dimensionless knobs of the gravitational interaction stage.

    theta   : beam-splitter phase g_G * t_G (radians, any finite sign)
    damping : gamma_m * t_G >= 0
    n_th    : mechanical bath occupation N_th >= 0
    eta_a/b : readout transmittances in [0, 1]
    nbar_a/b: readout environment photon numbers >= 0
    """

    theta: float
    damping: float = 0.0
    n_th: float = 0.0
    eta_a: float = 1.0
    eta_b: float = 1.0
    nbar_a: float = 0.0
    nbar_b: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta}")
        if self.damping < 0 or not math.isfinite(self.damping):
            raise ValueError(f"damping must be >= 0, got {self.damping}")
        if self.n_th < 0 or not math.isfinite(self.n_th):
            raise ValueError(f"n_th must be >= 0, got {self.n_th}")
        for name in ("eta_a", "eta_b"):
            eta = getattr(self, name)
            if not 0.0 <= eta <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {eta}")
        for name in ("nbar_a", "nbar_b"):
            nbar = getattr(self, name)
            if nbar < 0 or not math.isfinite(nbar):
                raise ValueError(f"{name} must be >= 0, got {nbar}")

    @property
    def thermal(self) -> float:
        """Accumulated thermal decoherence gamma_m * t_G * N_th."""
        return self.damping * self.n_th


@dataclass(frozen=True)
class GravityChannel:
    """Transfer matrix and additive noise of the gravitational stage."""

    m: np.ndarray
    v_th: np.ndarray


def swap_coefficients(gt_p: float) -> tuple[float, float]:
    """Residual transmission and swap amplitude of a single red-detuned pulse.

    For pulse area G * t_P the mechanical mode keeps amplitude e^{-G t_P}
    while sqrt(1 - e^{-2 G t_P}) is exchanged with the optical mode; the two
    coefficients satisfy transmission^2 + swap_amplitude^2 = 1.
    """
    if gt_p < 0 or not math.isfinite(gt_p):
        raise ValueError(f"pulse area must be >= 0, got {gt_p}")
    transmission = math.exp(-gt_p)
    swap_amplitude = math.sqrt(-math.expm1(-2.0 * gt_p))
    return transmission, swap_amplitude


def gravity_channel(p: ChannelParams) -> GravityChannel:
    """Build the transfer matrix and thermal noise of the gravitational stage.

    The matrix is real: the imaginary beam-splitter coefficients combine with
    the swap phases into +/- e^{-d} sin(theta) entries.  At damping = 0 it is
    orthogonal, so vacuum maps to vacuum.
    """
    c = math.exp(-p.damping) * math.cos(p.theta)
    s = math.exp(-p.damping) * math.sin(p.theta)
    m = np.zeros((4, 4))
    m[0, 0] = m[1, 1] = m[2, 2] = m[3, 3] = -c
    m[0, 3] = m[2, 1] = s
    m[1, 2] = m[3, 0] = -s
    v_th = 2.0 * (-math.expm1(-2.0 * p.damping)) * p.n_th * np.eye(4)
    return GravityChannel(m=m, v_th=v_th)


def evolve(v_in: np.ndarray, ch: GravityChannel) -> np.ndarray:
    """Propagate a covariance matrix through the channel: M V M^T + V_th."""
    check_symmetric(v_in)
    out = ch.m @ v_in @ ch.m.T + ch.v_th
    return 0.5 * (out + out.T)


def apply_loss(v: np.ndarray, p: ChannelParams) -> np.ndarray:
    """Apply local readout loss to both output modes.

    Block action: V_A -> eta_A V_A + (1 - eta_A)(2 nbar_A + 1) I, likewise for
    B, and the cross block is scaled by sqrt(eta_A eta_B).  For equal
    transmittances and vacuum environments this is eta V + (1 - eta) I.
    """
    check_symmetric(v)
    out = v.copy()
    out[:2, :2] = p.eta_a * v[:2, :2] + (1.0 - p.eta_a) * (2.0 * p.nbar_a + 1.0) * np.eye(2)
    out[2:, 2:] = p.eta_b * v[2:, 2:] + (1.0 - p.eta_b) * (2.0 * p.nbar_b + 1.0) * np.eye(2)
    cross = math.sqrt(p.eta_a * p.eta_b)
    out[:2, 2:] = cross * v[:2, 2:]
    out[2:, :2] = cross * v[2:, :2]
    return 0.5 * (out + out.T)


def input_squeezed_pair(zeta: float) -> np.ndarray:
    """Covariance of two single-mode states squeezed along the same axis."""
    if not math.isfinite(zeta):
        raise ValueError(f"zeta must be finite, got {zeta}")
    return np.diag([math.exp(2 * zeta), math.exp(-2 * zeta)] * 2)


def input_tmsv(r: float) -> np.ndarray:
    """Covariance of a two-mode squeezed vacuum with squeezing parameter r."""
    if not math.isfinite(r):
        raise ValueError(f"r must be finite, got {r}")
    v = np.zeros((4, 4))
    v[:2, :2] = math.cosh(2 * r) * np.eye(2)
    v[2:, 2:] = math.cosh(2 * r) * np.eye(2)
    v[:2, 2:] = v[2:, :2] = math.sinh(2 * r) * np.diag([1.0, -1.0])
    return v


def check_symmetric(v: np.ndarray, tol: float = SYMMETRY_TOL) -> None:
    """Raise if v is not a real symmetric 4x4 matrix (entrywise tolerance)."""
    v = np.asarray(v)
    if v.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {v.shape}")
    scale = max(1.0, float(np.abs(v).max()))
    if np.abs(v - v.T).max() > tol * scale:
        raise ValueError("covariance matrix is not symmetric")


def physicality_defect(v: np.ndarray) -> float:
    """Smallest eigenvalue of V + i*Omega; >= 0 for physical states."""
    return float(np.linalg.eigvalsh(np.asarray(v, dtype=complex) + SIGMA_HERM)[0])


def is_physical(v: np.ndarray, tol: float = PHYSICALITY_TOL) -> bool:
    """Whether v satisfies the uncertainty relation V + i*Omega >= -tol."""
    return physicality_defect(v) >= -tol


def _det2(a, b, c, d):
    return a * d - b * c


_LAPLACE_PAIRS = (
    ((0, 1), (2, 3), 1),
    ((0, 2), (1, 3), -1),
    ((0, 3), (1, 2), 1),
    ((1, 2), (0, 3), 1),
    ((1, 3), (0, 2), -1),
    ((2, 3), (0, 1), 1),
)


def _exact_det4(m) -> Fraction:
    """Exact determinant of a 4x4 float matrix via two-row Laplace expansion.

    Float64 entries are exact rationals, so the expansion in Fraction
    arithmetic has no round-off.  This keeps the sigma-formula usable for
    states with huge dynamic range (e.g. evolved r = 20 two-mode squeezing),
    where LU determinants lose every significant digit.
    """
    f = [[Fraction(float(m[i, j])) for j in range(4)] for i in range(4)]
    total = Fraction(0)
    for (i, j), (k, l), sign in _LAPLACE_PAIRS:
        top = _det2(f[0][i], f[0][j], f[1][i], f[1][j])
        bot = _det2(f[2][k], f[2][l], f[3][k], f[3][l])
        total += sign * top * bot
    return total


def _exact_det2(block) -> Fraction:
    a, b = Fraction(float(block[0, 0])), Fraction(float(block[0, 1]))
    c, d = Fraction(float(block[1, 0])), Fraction(float(block[1, 1]))
    return _det2(a, b, c, d)


def ppt_min_symplectic_eigenvalue(v: np.ndarray) -> float:
    """Smallest symplectic eigenvalue of the partially transposed state.

    Uses nu_-^2 = (sigma - sqrt(sigma^2 - 4 det V)) / 2 with
    sigma = det V_A + det V_B - 2 det V_AB, evaluated through exact rational
    determinants and the cancellation-free root
    nu_-^2 = 2 det V / (sigma + sqrt(sigma^2 - 4 det V)).

    The state is PPT (separable for two modes) iff the result is >= 1.
    """
    check_symmetric(v)
    det_a = _exact_det2(v[:2, :2])
    det_b = _exact_det2(v[2:, 2:])
    det_c = _exact_det2(v[:2, 2:])
    det_v = _exact_det4(v)
    sigma = det_a + det_b - 2 * det_c
    disc = sigma * sigma - 4 * det_v
    if disc < 0:
        # Exact arithmetic: a genuinely negative discriminant means the input
        # was not a valid covariance matrix, not round-off; still allow a
        # relative sliver for callers feeding in float-degraded matrices.
        if float(-disc) > 1e-9 * (1.0 + float(sigma * sigma)):
            raise NumericalConsistencyError(
                f"sigma^2 - 4 det V = {float(disc):g} < 0: input is not a "
                "valid two-mode covariance matrix"
            )
        disc = Fraction(0)
    if sigma <= 0 or det_v <= 0:
        raise NumericalConsistencyError(
            "nonpositive sigma or determinant: input is not a valid "
            "two-mode covariance matrix"
        )
    nu2 = 2.0 * float(det_v) / (float(sigma) + math.sqrt(float(disc)))
    if nu2 <= 0.0:
        raise NumericalConsistencyError("partial-transpose spectrum collapsed to zero")
    return math.sqrt(nu2)


def gaussian_negativity(v: np.ndarray) -> float:
    """Entanglement negativity max(0, (1/nu_- - 1)/2) of a two-mode state."""
    nu = ppt_min_symplectic_eigenvalue(v)
    return max(0.0, 0.5 * (1.0 / nu - 1.0))


def evolve_nu_min_exact(v_in: np.ndarray, ch: GravityChannel) -> float:
    """nu_- of M V M^T + V_th with the evolution in exact rational arithmetic.

    A float covariance matrix stores entries to one ulp; for extremely
    squeezed inputs (cosh 2r beyond ~1e8) that granularity erases the O(1)
    partial-transpose eigenvalue, which lives in sub-ulp combinations of the
    evolved entries.  Float64 inputs are exact rationals, so carrying the
    matrix product in Fraction arithmetic keeps every digit.
    """
    check_symmetric(v_in)
    m = [[Fraction(float(ch.m[i, j])) for j in range(4)] for i in range(4)]
    v = [[Fraction(float(v_in[i, j])) for j in range(4)] for i in range(4)]
    mv = [[sum(m[i][k] * v[k][j] for k in range(4)) for j in range(4)] for i in range(4)]
    out = [
        [
            sum(mv[i][k] * m[j][k] for k in range(4)) + Fraction(float(ch.v_th[i, j]))
            for j in range(4)
        ]
        for i in range(4)
    ]

    def det2(i0, i1, j0, j1):
        return out[i0][j0] * out[i1][j1] - out[i0][j1] * out[i1][j0]

    det_a = det2(0, 1, 0, 1)
    det_b = det2(2, 3, 2, 3)
    det_c = det2(0, 1, 2, 3)
    det_v = Fraction(0)
    for (i, j), (k, l), sign in _LAPLACE_PAIRS:
        top = out[0][i] * out[1][j] - out[0][j] * out[1][i]
        bot = out[2][k] * out[3][l] - out[2][l] * out[3][k]
        det_v += sign * top * bot
    sigma = det_a + det_b - 2 * det_c
    disc = sigma * sigma - 4 * det_v
    if disc < 0 or sigma <= 0 or det_v <= 0:
        raise NumericalConsistencyError("input is not a valid two-mode covariance matrix")
    nu2 = 2.0 * float(det_v) / (float(sigma) + math.sqrt(float(disc)))
    return math.sqrt(nu2)


def closed_form_nu_squeezed(zeta: float, theta: float, thermal: float, eta: float = 1.0) -> float:
    """Effective nu_- for equally squeezed inputs, valid for damping << 1.

    Cancellation-free evaluation: with E = eta |sinh 2 zeta sin 2 theta| the
    square of the noise factor minus E^2 is a sum of nonnegative terms, so
    nu = (f - E^2) / (sqrt(f) + E) stays accurate even at zeta ~ 20 where
    sqrt(f) and E agree to sixteen digits.
    """
    if abs(zeta) > 300.0:
        raise ValueError(f"|zeta| too large for double precision: {zeta}")
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if thermal < 0:
        raise ValueError(f"thermal must be >= 0, got {thermal}")
    ch = math.cosh(2 * zeta)
    sh = abs(math.sinh(2 * zeta))
    s2t = abs(math.sin(2 * theta))
    e_term = eta * sh * s2t
    f_minus_e2 = (
        1.0
        + 2.0 * eta * (1.0 - eta) * (ch - 1.0)
        + 8.0 * thermal * eta * (1.0 + eta * (ch - 1.0))
        + 16.0 * (eta * thermal) ** 2
    )
    return f_minus_e2 / (math.sqrt(f_minus_e2 + e_term * e_term) + e_term)


def closed_form_negativity_squeezed(zeta: float, p: ChannelParams) -> float:
    """Closed-form negativity for equally squeezed inputs through the channel.

    Lossless when eta = 1, otherwise the symmetric pure-loss form.  Valid in
    the weak-dissipation regime damping << 1 (caller's responsibility); the
    numeric pipeline evolve -> apply_loss -> gaussian_negativity is the ground
    truth outside it.  Requires eta_a == eta_b and vacuum environments.
    """
    if p.eta_a != p.eta_b:
        raise ValueError("closed form requires eta_a == eta_b")
    if p.nbar_a != 0.0 or p.nbar_b != 0.0:
        raise ValueError("closed form requires vacuum readout environments")
    if p.eta_a == 0.0:
        raise ValueError("eta = 0 leaves no signal to evaluate")
    nu = closed_form_nu_squeezed(zeta, p.theta, p.thermal, p.eta_a)
    return max(0.0, 0.5 * (1.0 / nu - 1.0))
