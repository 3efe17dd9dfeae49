"""Unit conventions.

Internal units: lengths in nm, c = eps0 = mu0 = 1.  Time is then
measured in nm (light travel time across 1 nm); angular frequencies in
rad/nm (= 2*pi/wavelength).  Interfaces that report times in fs or
material frequencies in rad/fs convert through C_NM_PER_FS.
"""

# speed of light, nm per fs
C_NM_PER_FS = 299.792458


def fs_to_nm(t_fs: float) -> float:
    """Time in fs -> internal time units (nm of light travel)."""
    return t_fs * C_NM_PER_FS


def nm_to_fs(t_nm: float) -> float:
    """Internal time units -> fs."""
    return t_nm / C_NM_PER_FS


def omega_from_wavelength(wavelength_nm: float) -> float:
    """Angular frequency in rad/nm for a vacuum wavelength in nm."""
    import math

    return 2.0 * math.pi / wavelength_nm
