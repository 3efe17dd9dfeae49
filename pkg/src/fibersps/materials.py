"""Optical material models: dispersive gold and silica.

Gold is a Drude term plus two Lorentz poles, least-squares fitted over
600-900 nm to the Lorentz-Drude gold of Rakic et al., Appl. Opt. 37,
5271 (1998); the fit residual |d eps| stays below 0.01 across the band.
Convention is exp(-i w t), so lossy media have Im(eps) > 0.

Silica is the Malitson (1965) Sellmeier fit; the FDTD engine freezes it
at the 775 nm band-center value (n = 1.4537) while the mode solver can
evaluate the dispersive law per wavelength.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import C_NM_PER_FS

# rad/fs per eV (e/hbar scaled to fs)
EV_TO_RADFS = 1.602176634e-19 / 1.054571817e-34 * 1e-15

# Rakic et al. (1998) Lorentz-Drude parameters for gold (energies in eV);
# used as the tabulated reference the compact model is fitted to.
_RAKIC_WP = 9.03
_RAKIC_F0, _RAKIC_G0 = 0.760, 0.053
_RAKIC_F = (0.024, 0.010, 0.071, 0.601, 4.384)
_RAKIC_G = (0.241, 0.345, 0.870, 2.494, 2.214)
_RAKIC_W = (0.415, 0.830, 2.969, 4.304, 13.32)


def reference_gold_permittivity(wavelength_nm) -> np.ndarray:
    """Rakic Lorentz-Drude gold permittivity (the fit's reference data)."""
    w = 1239.841984 / np.asarray(wavelength_nm, dtype=float)
    eps = 1 - _RAKIC_F0 * _RAKIC_WP**2 / (w * (w + 1j * _RAKIC_G0))
    for f, g, w0 in zip(_RAKIC_F, _RAKIC_G, _RAKIC_W):
        eps = eps + f * _RAKIC_WP**2 / ((w0**2 - w**2) - 1j * w * g)
    return eps


@dataclass(frozen=True)
class DrudeLorentzModel:
    """Compact dispersive-metal model for the FDTD engine.

    eps(w) = eps_inf - wp^2 / (w^2 + i gamma w)
             + sum_j de_j w0_j^2 / (w0_j^2 - w^2 - i g_j w)

    drude is (plasma frequency, collision rate) and each Lorentz pole is
    (strength de, resonance w0, damping g); all frequencies in rad/fs.
    """

    eps_inf: float
    drude: tuple[float, float]
    lorentz_poles: tuple[tuple[float, float, float], ...] = field(default_factory=tuple)

    def permittivity(self, wavelength_nm) -> np.ndarray:
        """Complex relative permittivity at vacuum wavelength(s) in nm."""
        w = 2.0 * np.pi * C_NM_PER_FS / np.asarray(wavelength_nm, dtype=float)  # rad/fs
        wp, gd = self.drude
        eps = self.eps_inf - wp**2 / (w**2 + 1j * gd * w)
        for de, w0, g in self.lorentz_poles:
            eps = eps + de * w0**2 / (w0**2 - w**2 - 1j * g * w)
        return eps

    def drude_rad_per_nm(self) -> tuple[float, float]:
        """Drude parameters converted to the engine's rad/nm units."""
        wp, gd = self.drude
        return wp / C_NM_PER_FS, gd / C_NM_PER_FS

    def poles_rad_per_nm(self) -> tuple[tuple[float, float, float], ...]:
        return tuple((de, w0 / C_NM_PER_FS, g / C_NM_PER_FS) for de, w0, g in self.lorentz_poles)


def gold_drude_lorentz() -> DrudeLorentzModel:
    """Default gold model (fit frozen from scripts/fit_gold_model.py)."""
    return DrudeLorentzModel(
        eps_inf=4.349603202620314,
        drude=(12.307347864642985, 0.11151900339194493),
        lorentz_poles=(
            (1.7977506094267595, 4.620842316244762, 1.3477621925289867),
            (0.31395052746310764, 3.3423883873809244, 2.4951783794976556),
        ),
    )


# Malitson (1965) Sellmeier coefficients for fused silica, lambda in um
_SELLMEIER_B = (0.6961663, 0.4079426, 0.8974794)
_SELLMEIER_L = (0.0684043, 0.1162414, 9.896161)

# band-center (775 nm) silica index used by the nondispersive FDTD medium
SILICA_INDEX_FDTD = 1.4537


def silica_index(wavelength_nm) -> np.ndarray:
    """Fused-silica refractive index from the Sellmeier law."""
    lam_um2 = (np.asarray(wavelength_nm, dtype=float) / 1000.0) ** 2
    n2 = 1.0
    for b, l in zip(_SELLMEIER_B, _SELLMEIER_L):
        n2 = n2 + b * lam_um2 / (lam_um2 - l**2)
    return np.sqrt(n2)


# material ids used in MaterialMap rasterization
VACUUM = 0
SILICA = 1
GOLD = 2
