"""Dark states, mixing angles, and the gauge connection over the dark space.

Both driven configurations carry a two-fold degenerate null space ("dark"
states).  Its orthonormal basis is parametrized by two mixing angles:

* theta from the Stokes/driving amplitude ratio (both configurations),
* a second angle from the pump (y configuration) or from the electron
  Zeeman splitting against the total field strength (z configuration).

The matrix-valued gauge connection over the dark pair drives the geometric
rotation; it is computed analytically and cross-checked against a
finite-difference form here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .pulses import PulseSet, TwoPartPulse
from .qcore import DIM, IDX_ANC, IDX_E1, IDX_E2, IDX_ONE, IDX_ZERO


def mixing_theta(omega_s: float, omega_d: float, limit: float | None = None) -> float:
    """atan2(omega_s, omega_d) in [0, pi/2].

    When both fields have vanished the angle is defined only as a limit of
    the protocol; the caller must supply it explicitly.
    """
    if omega_s < 0.0 or omega_d < 0.0:
        raise ValueError("field amplitudes must be non-negative")
    if omega_s == 0.0 and omega_d == 0.0:
        if limit is None:
            raise ValueError("mixing angle undefined for vanished fields; supply the protocol limit")
        return limit
    return math.atan2(omega_s, omega_d)


def mixing_phi_y(omega_p: float, omega_s: float, omega_d: float,
                 limit: float | None = None) -> float:
    """atan2(omega_p, hypot(omega_s, omega_d)) in [0, pi/2]."""
    if min(omega_p, omega_s, omega_d) < 0.0:
        raise ValueError("field amplitudes must be non-negative")
    ground = math.hypot(omega_s, omega_d)
    if omega_p == 0.0 and ground == 0.0:
        if limit is None:
            raise ValueError("mixing angle undefined for vanished fields; supply the protocol limit")
        return limit
    return math.atan2(omega_p, ground)


def mixing_phi_z(delta: float, omega_s: float, omega_d: float) -> float:
    """atan2(delta/2, sqrt(2 (omega_s^2 + omega_d^2))) in [0, pi/2].

    Well defined even for vanished fields (limit pi/2) as long as delta > 0;
    zero splitting with live fields gives 0.
    """
    if delta < 0.0:
        raise ValueError("electron Zeeman splitting must be non-negative")
    if delta == 0.0 and omega_s == 0.0 and omega_d == 0.0:
        raise ValueError("mixing angle undefined: no splitting and no fields")
    return math.atan2(delta / 2.0, math.sqrt(2.0 * (omega_s ** 2 + omega_d ** 2)))


@dataclass(frozen=True)
class DarkPair:
    """Ordered orthonormal basis (d1, d2) of the degenerate dark space."""

    d1: np.ndarray
    d2: np.ndarray


def dark_states_y(theta: float, phi: float) -> DarkPair:
    """Dark pair of the y configuration; no support on the electron levels.

        d1 = cos(theta)|1> - sin(theta)|a>
        d2 = cos(phi)|0> - sin(phi) sin(theta)|1> - sin(phi) cos(theta)|a>
    """
    d1 = np.zeros(DIM, dtype=complex)
    d1[IDX_ONE] = math.cos(theta)
    d1[IDX_ANC] = -math.sin(theta)
    d2 = np.zeros(DIM, dtype=complex)
    d2[IDX_ZERO] = math.cos(phi)
    d2[IDX_ONE] = -math.sin(phi) * math.sin(theta)
    d2[IDX_ANC] = -math.sin(phi) * math.cos(theta)
    return DarkPair(d1, d2)


def dark_states_z(theta: float, phi: float, stokes_phase: float) -> DarkPair:
    """Dark pair of the midpoint-tuned z configuration.

        d1 = cos(theta) e^{i phase}|1> - sin(theta)|a>
        d2 = cos(phi)(|e1> - |e2>)/sqrt2 + sin(phi) cos(theta)|a>
             + sin(phi) sin(theta) e^{i phase}|1>

    d2 acquires electron-level support away from the weak-field limit
    (phi -> pi/2 when the fields vanish).
    """
    ph = np.exp(1j * stokes_phase)
    d1 = np.zeros(DIM, dtype=complex)
    d1[IDX_ONE] = math.cos(theta) * ph
    d1[IDX_ANC] = -math.sin(theta)
    d2 = np.zeros(DIM, dtype=complex)
    d2[IDX_E1] = math.cos(phi) / math.sqrt(2.0)
    d2[IDX_E2] = -math.cos(phi) / math.sqrt(2.0)
    d2[IDX_ANC] = math.sin(phi) * math.cos(theta)
    d2[IDX_ONE] = math.sin(phi) * math.sin(theta) * ph
    return DarkPair(d1, d2)


def connection_y(phi: float) -> np.ndarray:
    """Analytic gauge connection (per unit theta) in the ordered (d1, d2) basis.

    Real antisymmetric: A[0,1] = -sin(phi), A[1,0] = +sin(phi); equal to
    -i sin(phi) sigma_y.
    """
    s = math.sin(phi)
    return np.array([[0.0, -s], [s, 0.0]], dtype=complex)


def connection_numeric(basis_at, theta: float, h: float) -> np.ndarray:
    """Central-difference connection <psi_a(theta)|d/dtheta psi_b(theta)>.

    ``basis_at`` maps theta -> DarkPair.  Only the anti-Hermitian part is
    returned (the Hermitian part is pure discretization noise).
    """
    if h <= 0.0:
        raise ValueError("finite-difference step must be positive")
    here = basis_at(theta)
    plus = basis_at(theta + h)
    minus = basis_at(theta - h)
    vecs = (here.d1, here.d2)
    dvecs = ((plus.d1 - minus.d1) / (2.0 * h), (plus.d2 - minus.d2) / (2.0 * h))
    a = np.array([[np.vdot(vecs[i], dvecs[j]) for j in range(2)] for i in range(2)])
    return 0.5 * (a - a.conj().T)


def darkness_residual(hamiltonian: np.ndarray, pair: DarkPair) -> tuple[float, float]:
    """Norms ||H d1||, ||H d2||; both vanish for a matched configuration."""
    h = np.asarray(hamiltonian, dtype=complex)
    return (float(np.linalg.norm(h @ pair.d1)), float(np.linalg.norm(h @ pair.d2)))


# ---------------------------------------------------------------------------
# Protocol-level angle tracks evaluated from a PulseSet.  Rates use the
# envelopes' analytic derivatives through the exact ratio formulas, so no
# finite differencing enters the holonomy quadrature.
# ---------------------------------------------------------------------------

def theta_limits(pulses: PulseSet) -> tuple[float, float]:
    """Continuous-extension values of theta at t -> -inf and t -> +inf.

    Determined by which envelope's (latest/earliest) Gaussian component
    dominates in each tail; a tie means the ratio freezes at the amplitude
    ratio, as in the fractional-STIRAP family.
    """
    s = pulses.stokes
    d = pulses.driving
    if not (hasattr(s, "center") and (hasattr(d, "center") or isinstance(d, TwoPartPulse))):
        raise ValueError("theta limits are defined only for the Gaussian pulse families")
    s_amp, s_center = s.amplitude, s.center
    if isinstance(d, TwoPartPulse):
        d_amp = d.amplitude * (2.0 if d.early_center == d.late_center else 1.0)
        d_early, d_late = d.early_center, d.late_center
    else:
        d_amp, d_early, d_late = d.amplitude, d.center, d.center

    def one_side(s_wins: bool, tie: bool) -> float:
        if tie:
            return math.atan2(s_amp, d_amp)
        return math.pi / 2.0 if s_wins else 0.0

    early = one_side(s_center < d_early, s_center == d_early)
    late = one_side(s_center > d_late, s_center == d_late)
    return early, late


def theta_track(pulses: PulseSet, t: float) -> float:
    """Mixing angle theta at time t, with tail values from theta_limits."""
    early, late = theta_limits(pulses)
    return mixing_theta(pulses.stokes(t), pulses.driving(t),
                        limit=early if t < 0.0 else late)


def theta_rate(pulses: PulseSet, t: float) -> float:
    """d theta / dt from the envelope derivatives (exact ratio formula)."""
    om_s = pulses.stokes(t)
    om_d = pulses.driving(t)
    denom = om_s * om_s + om_d * om_d
    if denom == 0.0:
        return 0.0
    return (pulses.stokes.derivative(t) * om_d - om_s * pulses.driving.derivative(t)) / denom


def sin_phi_y(pulses: PulseSet, t: float) -> float:
    """sin of the pump mixing angle; 0 outside the pulse support."""
    om_p = pulses.pump(t)
    norm = math.sqrt(om_p ** 2 + pulses.stokes(t) ** 2 + pulses.driving(t) ** 2)
    if norm == 0.0:
        return 0.0
    return om_p / norm


def sin_phi_z(pulses: PulseSet, t: float, delta: float) -> float:
    """sin of the Zeeman mixing angle; 1 outside the pulse support."""
    half = delta / 2.0
    return half / math.hypot(half, math.sqrt(2.0) * math.hypot(pulses.stokes(t), pulses.driving(t)))


def phi_rate_y(pulses: PulseSet, t: float) -> float:
    """d/dt of the pump mixing angle (zero where all fields vanished)."""
    om_p = pulses.pump(t)
    om_s = pulses.stokes(t)
    om_d = pulses.driving(t)
    g2 = om_s * om_s + om_d * om_d
    total = om_p * om_p + g2
    if total == 0.0:
        return 0.0
    g = math.sqrt(g2)
    gdot = 0.0 if g == 0.0 else (om_s * pulses.stokes.derivative(t)
                                 + om_d * pulses.driving.derivative(t)) / g
    return (pulses.pump.derivative(t) * g - om_p * gdot) / total


def phi_rate_z(pulses: PulseSet, t: float, delta: float) -> float:
    """d/dt of the Zeeman mixing angle."""
    om_s = pulses.stokes(t)
    om_d = pulses.driving(t)
    half = delta / 2.0
    g2 = om_s * om_s + om_d * om_d
    if g2 == 0.0:
        return 0.0
    fdot = math.sqrt(2.0) * (om_s * pulses.stokes.derivative(t)
                             + om_d * pulses.driving.derivative(t)) / math.sqrt(g2)
    return -half * fdot / (half * half + 2.0 * g2)


def bright_splitting_z(pulses: PulseSet, t: float, params: ModelParams) -> float:
    """Dark-to-bright eigenvalue splitting of the z configuration."""
    f2 = 2.0 * (pulses.stokes(t) ** 2 + pulses.driving(t) ** 2)
    return 2.0 * math.sqrt(f2 + (params.delta / 2.0) ** 2)


def bright_splitting_y(pulses: PulseSet, t: float, params: ModelParams) -> float:
    """Dark-to-bright eigenvalue splitting of the y configuration."""
    f2 = 2.0 * (pulses.pump(t) ** 2 + pulses.stokes(t) ** 2 + pulses.driving(t) ** 2)
    return 2.0 * math.sqrt(f2 + (params.delta / 2.0) ** 2)


def adiabaticity_ratio(pulses: PulseSet, params: ModelParams, times,
                       config: str) -> float:
    """max over `times` of |mixing-angle rate| / bright splitting.

    The classic sufficient condition for confinement to the dark space asks
    this to be small throughout the dynamically active window (the ratio
    diverges harmlessly in the far tails where the couplings themselves are
    negligible, so callers should restrict `times` to the pulse support).
    """
    if config not in ("y", "z"):
        raise ValueError("config must be 'y' or 'z'")
    worst = 0.0
    for t in times:
        if config == "y":
            rate = max(abs(theta_rate(pulses, t)), abs(phi_rate_y(pulses, t)))
            gap = bright_splitting_y(pulses, t, params)
        else:
            rate = max(abs(theta_rate(pulses, t)), abs(phi_rate_z(pulses, t, params.delta)))
            gap = bright_splitting_z(pulses, t, params)
        if gap > 0.0:
            worst = max(worst, rate / gap)
    return worst
