"""Point-dipole current sources.

A dipole is represented by its current moment I(t) = dp/dt along a unit
orientation vector.  Off-grid positions are handled by trilinear
spreading of the current onto the eight nearest edges of each field
component's staggered lattice, so separation sweeps are not snapped to
the grid.  Sources are soft (additive current) by default; a hard
source overwrites the field instead and exists only as a debugging aid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import E_OFFSETS, YeeGrid


@dataclass(frozen=True)
class GaussianPulse:
    """Gaussian-modulated carrier: I(t) = A exp(-(t-t0)^2/2s^2) cos(wc (t-t0)).

    sigma_t is the envelope width in internal time units (nm of light
    travel); t0 defaults to 6 sigma so the turn-on transient is below
    1e-7 of the peak.
    """

    center_wavelength: float = 740.0
    sigma_t: float = 300.0
    amplitude: float = 1.0
    t0: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.t0 is None:
            object.__setattr__(self, "t0", 6.0 * self.sigma_t)

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.center_wavelength

    @property
    def end_time(self) -> float:
        """Time after which the envelope is < 1e-7 of peak (ring-down)."""
        return self.t0 + 6.0 * self.sigma_t

    def current(self, t) -> np.ndarray:
        tau = np.asarray(t, dtype=float) - self.t0
        return self.amplitude * np.exp(-(tau**2) / (2.0 * self.sigma_t**2)) * np.cos(self.omega * tau)

    def spectrum(self, omega) -> np.ndarray:
        """Continuous Fourier transform  I(w) = int I(t) e^{i w t} dt."""
        w = np.asarray(omega, dtype=float)
        s = self.sigma_t
        gauss = math.sqrt(2.0 * math.pi) * s / 2.0
        env = np.exp(-(s**2) * (w - self.omega) ** 2 / 2.0) + np.exp(
            -(s**2) * (w + self.omega) ** 2 / 2.0
        )
        return self.amplitude * gauss * env * np.exp(1j * w * self.t0)

    def spectral_amplitude_fraction(self, wavelength_nm) -> np.ndarray:
        """|I(w)| relative to the pulse's spectral peak."""
        w = 2.0 * math.pi / np.asarray(wavelength_nm, dtype=float)
        peak = abs(self.spectrum(np.array([self.omega]))[0])
        return np.abs(self.spectrum(w)) / peak


@dataclass(frozen=True)
class DipoleSource:
    """Point dipole at a physical position (nm) with unit orientation."""

    position: tuple[float, float, float]
    orientation: tuple[float, float, float] = (0.0, 0.0, 1.0)
    pulse: GaussianPulse = field(default_factory=GaussianPulse)
    soft: bool = True

    def __post_init__(self):
        n = math.sqrt(sum(c * c for c in self.orientation))
        if n == 0:
            raise ValueError("dipole orientation must be nonzero")
        if abs(n - 1.0) > 1e-9:
            object.__setattr__(self, "orientation", tuple(c / n for c in self.orientation))

    def edge_weights(self, grid: YeeGrid):
        """Trilinear spreading onto each component's edge lattice.

        Returns {comp: (idx, weights)} for components with nonzero
        orientation projection; idx is an (n, 3) integer array of edge
        indices and weights the matching current fractions (already
        multiplied by the orientation component; weights sum to the
        orientation component).
        """
        out = {}
        h = grid.resolution
        for ci, comp in enumerate("xyz"):
            amp = self.orientation[ci]
            if amp == 0.0:
                continue
            off = E_OFFSETS[comp]
            u = [
                (self.position[a] - grid.origin[a]) / h - off[a] for a in range(3)
            ]
            base = [int(math.floor(v)) for v in u]
            frac = [u[a] - base[a] for a in range(3)]
            idx = []
            wts = []
            for corner in range(8):
                bits = [(corner >> a) & 1 for a in range(3)]
                w = 1.0
                pos = []
                for a in range(3):
                    w *= frac[a] if bits[a] else (1.0 - frac[a])
                    pos.append(base[a] + bits[a])
                if w == 0.0:
                    continue
                if any(p < 0 or p >= grid.extent[a] for a, p in enumerate(pos)):
                    raise ValueError("dipole spreading extends outside the grid")
                idx.append(pos)
                wts.append(w * amp)
            out[comp] = (np.asarray(idx, dtype=np.int64), np.asarray(wts, dtype=np.float64))
        return out
