"""Laser-field envelopes and named pulse sets.

Units: time in picoseconds, envelope values are half Rabi frequencies in
rad/ps (the envelopes are exactly the coupling strengths entering the
Hamiltonians, with no extra factor of two anywhere).

Two protocol families are provided:

* y rotation: three delayed Gaussians (driving early at -tau0, pump at 0,
  Stokes late at +tau0), plus a pump-free return set with the Stokes and
  driving order swapped.
* z rotation (fractional STIRAP): Stokes Gaussian at 0 and a two-part
  driving field (Gaussian at -tau0 plus Gaussian at 0), so the two
  envelopes terminate with a frozen amplitude ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def gaussian(t: float, amp: float, center: float, width: float) -> float:
    """amp * exp(-(t - center)^2 / width^2)."""
    if width <= 0.0:
        raise ValueError("gaussian width must be positive")
    if amp < 0.0:
        raise ValueError("gaussian amplitude must be non-negative")
    x = (t - center) / width
    return amp * math.exp(-x * x)


@dataclass(frozen=True)
class GaussianPulse:
    """Gaussian envelope amp * exp(-(t-center)^2/width^2)."""

    amplitude: float
    center: float
    width: float

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValueError("pulse width must be positive")
        if self.amplitude < 0.0:
            raise ValueError("pulse amplitude must be non-negative")

    def __call__(self, t: float) -> float:
        x = (t - self.center) / self.width
        return self.amplitude * math.exp(-x * x)

    def derivative(self, t: float) -> float:
        x = (t - self.center) / self.width
        return -2.0 * x / self.width * self.amplitude * math.exp(-x * x)


@dataclass(frozen=True)
class TwoPartPulse:
    """Sum of two equal-amplitude Gaussians (the fractional-STIRAP drive)."""

    amplitude: float
    early_center: float
    late_center: float
    width: float

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValueError("pulse width must be positive")
        if self.amplitude < 0.0:
            raise ValueError("pulse amplitude must be non-negative")

    def __call__(self, t: float) -> float:
        xe = (t - self.early_center) / self.width
        xl = (t - self.late_center) / self.width
        return self.amplitude * (math.exp(-xe * xe) + math.exp(-xl * xl))

    def derivative(self, t: float) -> float:
        xe = (t - self.early_center) / self.width
        xl = (t - self.late_center) / self.width
        return (-2.0 * self.amplitude / self.width
                * (xe * math.exp(-xe * xe) + xl * math.exp(-xl * xl)))


@dataclass(frozen=True)
class ConstantPulse:
    """Flat envelope, used for continuous pumping and readout drives."""

    amplitude: float

    def __post_init__(self):
        if self.amplitude < 0.0:
            raise ValueError("pulse amplitude must be non-negative")

    def __call__(self, t: float) -> float:
        return self.amplitude

    def derivative(self, t: float) -> float:
        return 0.0


OFF = ConstantPulse(0.0)


@dataclass(frozen=True)
class PulseSet:
    """The three envelopes of one protocol segment plus the Stokes phase.

    delay/width are kept for bookkeeping (integration windows, manifests);
    the envelopes themselves already encode the geometry.
    """

    pump: object
    stokes: object
    driving: object
    stokes_phase: float = 0.0
    delay: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValueError("pulse-set width must be positive")
        if self.delay < 0.0:
            raise ValueError("pulse-set delay must be non-negative")

    def window(self, margin: float = 8.0) -> tuple[float, float]:
        """Truncation window; Gaussian tails at the edges are < 1e-27 of peak."""
        half = self.delay + margin * self.width
        return (-half, half)


def make_y_pulseset(amp_p: float, amp_s: float, amp_d: float,
                    tau0: float, tau: float) -> PulseSet:
    """Forward y-rotation set: driving at -tau0, pump at 0, Stokes at +tau0."""
    if tau <= 0.0:
        raise ValueError("pulse width must be positive")
    return PulseSet(
        pump=GaussianPulse(amp_p, 0.0, tau),
        stokes=GaussianPulse(amp_s, +tau0, tau),
        driving=GaussianPulse(amp_d, -tau0, tau),
        stokes_phase=0.0,
        delay=abs(tau0),
        width=tau,
    )


def make_y_return_pulseset(amp_s: float, amp_d: float,
                           tau0: float, tau: float) -> PulseSet:
    """Pump-free retraction set (Stokes early, driving late).

    Used to close the y-rotation loop: it carries the mixing angle from
    pi/2 back to 0 with the second mixing angle pinned at zero, so no
    further geometric phase accumulates.
    """
    if tau <= 0.0:
        raise ValueError("pulse width must be positive")
    return PulseSet(
        pump=OFF,
        stokes=GaussianPulse(amp_s, -tau0, tau),
        driving=GaussianPulse(amp_d, +tau0, tau),
        stokes_phase=0.0,
        delay=abs(tau0),
        width=tau,
    )


def make_z_pulseset(amp_s: float, amp_d: float, tau0: float, tau: float,
                    phi: float) -> PulseSet:
    """Fractional-STIRAP set: the two envelopes end at a frozen ratio.

    Stokes is a Gaussian at 0; the driving field is a Gaussian at -tau0
    plus one at 0, so Stokes/driving -> amp_s/amp_d as t -> +inf.  phi is
    the relative phase of the Stokes field against the driving field.
    """
    if tau <= 0.0:
        raise ValueError("pulse width must be positive")
    return PulseSet(
        pump=OFF,
        stokes=GaussianPulse(amp_s, 0.0, tau),
        driving=TwoPartPulse(amp_d, -tau0, 0.0, tau),
        stokes_phase=phi,
        delay=abs(tau0),
        width=tau,
    )
