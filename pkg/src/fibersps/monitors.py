"""Running-DFT monitors and power spectra.

Monitors accumulate exp(+i w t)-weighted field samples every time step.
E samples carry the integer-step time (n+1) dt, H samples the staggered
(n+1/2) dt, so accumulated phasors are mutually consistent.  A spectral
density like flux or source work is then

    dU/dw = (1/pi) Re[ E(w) x H(w)* ] . dA      (w > 0, real fields)

in source-normalized units.  Plane fields are interpolated to common
face-center points before accumulation; this is what bounds the energy
bookkeeping error (second order in resolution).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import GridMismatchError
from .grid import YeeGrid

# ---------------------------------------------------------------------------
# descriptors (pure configuration, serializable)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SourcePower:
    """Work done by the source current: total emitted power spectrum."""

    name: str = "source"


@dataclass(frozen=True)
class FluxPlane:
    """Poynting flux through an axis-normal plane.

    sign +1 counts flux toward +axis as positive.  window is
    ((lo1, hi1), (lo2, hi2)) in nm over the two transverse axes in
    cyclic order (axis x -> transverse y,z; y -> z,x; z -> x,y); None
    spans the full domain.
    """

    name: str
    axis: str
    position: float
    sign: int = 1
    window: Optional[tuple] = None


@dataclass(frozen=True)
class FluxBox:
    """Outward Poynting flux through a closed axis-aligned box."""

    name: str
    center: tuple[float, float, float]
    size: tuple[float, float, float]


@dataclass(frozen=True)
class CouplingPlane:
    """Transverse plane recording tangential DFT fields for guided-mode
    projection.  direction +1 places it on the +z side (forward power),
    -1 on the -z side."""

    name: str
    position: float
    direction: int = 1
    window: Optional[tuple] = None


@dataclass(frozen=True)
class PointProbe:
    """Trilinearly interpolated E-field phasor at a point."""

    name: str
    position: tuple[float, float, float]


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------


@dataclass
class Spectrum:
    """Per-wavelength real values (power in source-normalized units)."""

    wavelengths: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.wavelengths = np.asarray(self.wavelengths, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.wavelengths.shape != self.values.shape:
            raise GridMismatchError("wavelengths and values must have equal length")

    def to_csv(self, path):
        rows = np.column_stack([self.wavelengths, self.values])
        np.savetxt(path, rows, delimiter=",", header="wavelength_nm,value", comments="")

    def interp(self, wavelength):
        return np.interp(wavelength, self.wavelengths, self.values)


# ---------------------------------------------------------------------------
# runtime monitors
# ---------------------------------------------------------------------------

_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}
# transverse axes in cyclic order for each normal
_TRANSVERSE = {"x": ("y", "z"), "y": ("z", "x"), "z": ("x", "y")}


class DftMonitor:
    """Base runtime DFT accumulator.

    Subclasses implement _sample(state) returning the per-step
    contribution; accumulate() applies the phase weights.
    """

    def __init__(self, descriptor, grid: YeeGrid, wavelengths, dt: float):
        self.descriptor = descriptor
        self.grid = grid
        self.wavelengths = np.asarray(wavelengths, dtype=float)
        self.omegas = 2.0 * math.pi / self.wavelengths
        self.dt = dt
        self.name = descriptor.name

    def accumulate(self, state):
        raise NotImplementedError

    def arrays(self) -> dict:
        """Raw accumulated arrays, for caching."""
        raise NotImplementedError

    def load_arrays(self, data: dict):
        raise NotImplementedError


def accumulate(monitor: DftMonitor, state) -> DftMonitor:
    """Add one time step of field data to the monitor (called once per
    step, after the E update).  Linear in field amplitude."""
    monitor.accumulate(state)
    return monitor


class PlaneDft(DftMonitor):
    """Tangential E/H phasors at face-center points of one plane."""

    def __init__(self, descriptor, grid, wavelengths, dt):
        super().__init__(descriptor, grid, wavelengths, dt)
        ax = descriptor.axis if isinstance(descriptor, FluxPlane) else "z"
        self.axis = _AXIS_INDEX[ax]
        self.axis_name = ax
        h = grid.resolution
        # snap to the nearest integer (E) plane along the normal
        self.index = int(round((descriptor.position - grid.origin[self.axis]) / h))
        if not 1 <= self.index < grid.extent[self.axis] - 1:
            raise GridMismatchError(
                f"monitor plane at {descriptor.position} nm is outside the grid interior"
            )
        self.position = grid.origin[self.axis] + self.index * h
        t1, t2 = (_AXIS_INDEX[a] for a in _TRANSVERSE[ax])
        n1, n2 = grid.extent[t1] - 1, grid.extent[t2] - 1
        lo1, hi1, lo2, hi2 = 0, n1, 0, n2
        window = descriptor.window
        if window is not None:
            (w1lo, w1hi), (w2lo, w2hi) = window
            lo1 = max(0, int(math.floor((w1lo - grid.origin[t1]) / h - 0.5)) + 1)
            hi1 = min(n1, int(math.ceil((w1hi - grid.origin[t1]) / h - 0.5)))
            lo2 = max(0, int(math.floor((w2lo - grid.origin[t2]) / h - 0.5)) + 1)
            hi2 = min(n2, int(math.ceil((w2hi - grid.origin[t2]) / h - 0.5)))
        self.slice1 = slice(lo1, hi1)
        self.slice2 = slice(lo2, hi2)
        # physical coordinates of the common (face-center) points
        self.coords1 = grid.origin[t1] + (np.arange(lo1, hi1) + 0.5) * h
        self.coords2 = grid.origin[t2] + (np.arange(lo2, hi2) + 0.5) * h
        shape = (len(self.wavelengths), hi1 - lo1, hi2 - lo2)
        # tangential components in cyclic order (E1, E2, H1, H2)
        self.e1 = np.zeros(shape, dtype=np.complex64)
        self.e2 = np.zeros(shape, dtype=np.complex64)
        self.h1 = np.zeros(shape, dtype=np.complex64)
        self.h2 = np.zeros(shape, dtype=np.complex64)

    def _tangential(self, state):
        """Interpolate tangential components to the face centers."""
        E, H = state.E, state.H
        p = self.index
        s1, s2 = self.slice1, self.slice2
        if self.axis_name == "z":
            ex, ey, hx, hy = E["x"], E["y"], H["x"], H["y"]
            e1 = 0.5 * (ex[s1, s2, p] + ex[s1, s2.start + 1 : s2.stop + 1, p])
            e2 = 0.5 * (ey[s1, s2, p] + ey[s1.start + 1 : s1.stop + 1, s2, p])
            h1 = 0.25 * (
                hx[s1, s2, p - 1]
                + hx[s1.start + 1 : s1.stop + 1, s2, p - 1]
                + hx[s1, s2, p]
                + hx[s1.start + 1 : s1.stop + 1, s2, p]
            )
            h2 = 0.25 * (
                hy[s1, s2, p - 1]
                + hy[s1, s2.start + 1 : s2.stop + 1, p - 1]
                + hy[s1, s2, p]
                + hy[s1, s2.start + 1 : s2.stop + 1, p]
            )
        elif self.axis_name == "x":
            ey, ez, hy, hz = E["y"], E["z"], H["y"], H["z"]
            e1 = 0.5 * (ey[p, s1, s2] + ey[p, s1, s2.start + 1 : s2.stop + 1])
            e2 = 0.5 * (ez[p, s1, s2] + ez[p, s1.start + 1 : s1.stop + 1, s2])
            h1 = 0.25 * (
                hy[p - 1, s1, s2]
                + hy[p, s1, s2]
                + hy[p - 1, s1.start + 1 : s1.stop + 1, s2]
                + hy[p, s1.start + 1 : s1.stop + 1, s2]
            )
            h2 = 0.25 * (
                hz[p - 1, s1, s2]
                + hz[p, s1, s2]
                + hz[p - 1, s1, s2.start + 1 : s2.stop + 1]
                + hz[p, s1, s2.start + 1 : s2.stop + 1]
            )
        else:  # y-normal
            ez, ex, hz, hx = E["z"], E["x"], H["z"], H["x"]
            e1 = 0.5 * (ez[s2, p, s1] + ez[s2.start + 1 : s2.stop + 1, p, s1]).T
            e2 = 0.5 * (ex[s2, p, s1] + ex[s2, p, s1.start + 1 : s1.stop + 1]).T
            h1 = 0.25 * (
                hz[s2, p - 1, s1]
                + hz[s2, p, s1]
                + hz[s2, p - 1, s1.start + 1 : s1.stop + 1]
                + hz[s2, p, s1.start + 1 : s1.stop + 1]
            ).T
            h2 = 0.25 * (
                hx[s2, p - 1, s1]
                + hx[s2, p, s1]
                + hx[s2.start + 1 : s2.stop + 1, p - 1, s1]
                + hx[s2.start + 1 : s2.stop + 1, p, s1]
            ).T
        return e1, e2, h1, h2

    def accumulate(self, state):
        from .kernels import dft_accumulate

        e1, e2, h1, h2 = self._tangential(state)
        ph_e = np.exp(1j * self.omegas * state.time_e).astype(np.complex64) * np.complex64(self.dt)
        ph_h = np.exp(1j * self.omegas * state.time_h).astype(np.complex64) * np.complex64(self.dt)
        dft_accumulate(self.e1, np.ascontiguousarray(e1), ph_e)
        dft_accumulate(self.e2, np.ascontiguousarray(e2), ph_e)
        dft_accumulate(self.h1, np.ascontiguousarray(h1), ph_h)
        dft_accumulate(self.h2, np.ascontiguousarray(h2), ph_h)

    def flux(self) -> np.ndarray:
        """Spectral flux along +axis, (1/pi) Re(E1 H2* - E2 H1*) dA."""
        h2cell = self.grid.resolution**2
        s = np.real(self.e1 * np.conj(self.h2) - self.e2 * np.conj(self.h1))
        return s.sum(axis=(1, 2)) * h2cell / math.pi

    def arrays(self):
        return {"e1": self.e1, "e2": self.e2, "h1": self.h1, "h2": self.h2}

    def load_arrays(self, data):
        self.e1, self.e2 = data["e1"], data["e2"]
        self.h1, self.h2 = data["h1"], data["h2"]


class BoxDft(DftMonitor):
    """Closed box assembled from six plane monitors (outward-positive)."""

    def __init__(self, descriptor: FluxBox, grid, wavelengths, dt):
        super().__init__(descriptor, grid, wavelengths, dt)
        c, s = descriptor.center, descriptor.size
        lo = [c[i] - s[i] / 2.0 for i in range(3)]
        hi = [c[i] + s[i] / 2.0 for i in range(3)]
        self.faces = []
        self.face_signs = []
        for ax_i, ax in enumerate("xyz"):
            t1, t2 = (_AXIS_INDEX[a] for a in _TRANSVERSE[ax])
            window = ((lo[t1], hi[t1]), (lo[t2], hi[t2]))
            for side, pos in ((-1, lo[ax_i]), (+1, hi[ax_i])):
                fp = FluxPlane(
                    name=f"{descriptor.name}[{ax}{'+' if side > 0 else '-'}]",
                    axis=ax,
                    position=pos,
                    sign=side,
                    window=window,
                )
                self.faces.append(PlaneDft(fp, grid, wavelengths, dt))
                self.face_signs.append(side)

    def accumulate(self, state):
        for f in self.faces:
            f.accumulate(state)

    def flux(self) -> np.ndarray:
        total = np.zeros(len(self.wavelengths))
        for f, sign in zip(self.faces, self.face_signs):
            total += sign * f.flux()
        return total

    def arrays(self):
        out = {}
        for i, f in enumerate(self.faces):
            for k, v in f.arrays().items():
                out[f"face{i}_{k}"] = v
        return out

    def load_arrays(self, data):
        for i, f in enumerate(self.faces):
            f.load_arrays({k: data[f"face{i}_{k}"] for k in ("e1", "e2", "h1", "h2")})


class SourceDft(DftMonitor):
    """Source-work spectrum: dU/dw = -(1/pi) Re[E_w(w) I(w)*].

    E_w is the DFT of the injection-weighted E field at the source edges
    sampled at half steps (matching the trapezoidal discrete work), I
    the DFT of the drive current.
    """

    def __init__(self, descriptor, grid, wavelengths, dt):
        super().__init__(descriptor, grid, wavelengths, dt)
        self.acc_e = np.zeros(len(self.wavelengths), dtype=np.complex128)
        self.acc_i = np.zeros(len(self.wavelengths), dtype=np.complex128)

    def accumulate(self, state):
        # fed by the engine via add_sample (needs pre/post-update fields)
        pass

    def add_sample(self, e_mid: float, current: float, t_mid: float):
        ph = np.exp(1j * self.omegas * t_mid) * self.dt
        self.acc_e += ph * e_mid
        self.acc_i += ph * current

    def power(self) -> np.ndarray:
        return -np.real(self.acc_e * np.conj(self.acc_i)) / math.pi

    def arrays(self):
        return {"acc_e": self.acc_e, "acc_i": self.acc_i}

    def load_arrays(self, data):
        self.acc_e, self.acc_i = data["acc_e"], data["acc_i"]


class ProbeDft(DftMonitor):
    """Complex E-field phasor (3 components) at a point."""

    def __init__(self, descriptor: PointProbe, grid, wavelengths, dt):
        super().__init__(descriptor, grid, wavelengths, dt)
        from .sources import DipoleSource

        self.acc = np.zeros((len(self.wavelengths), 3), dtype=np.complex128)
        self._weights = {}
        # reuse the trilinear stencil machinery with unit amplitude per axis
        for ci, comp in enumerate("xyz"):
            probe = DipoleSource(position=descriptor.position, orientation=tuple(
                1.0 if a == ci else 0.0 for a in range(3)
            ))
            self._weights[comp] = probe.edge_weights(grid)[comp]

    def accumulate(self, state):
        ph = np.exp(1j * self.omegas * state.time_e) * self.dt
        for ci, comp in enumerate("xyz"):
            idx, w = self._weights[comp]
            arr = state.E[comp]
            val = float(np.dot(arr[idx[:, 0], idx[:, 1], idx[:, 2]].astype(np.float64), w))
            self.acc[:, ci] += ph * val

    def arrays(self):
        return {"acc": self.acc}

    def load_arrays(self, data):
        self.acc = data["acc"]


def build_monitor(descriptor, grid, wavelengths, dt) -> DftMonitor:
    if isinstance(descriptor, SourcePower):
        return SourceDft(descriptor, grid, wavelengths, dt)
    if isinstance(descriptor, FluxPlane):
        return PlaneDft(descriptor, grid, wavelengths, dt)
    if isinstance(descriptor, FluxBox):
        return BoxDft(descriptor, grid, wavelengths, dt)
    if isinstance(descriptor, CouplingPlane):
        fp = FluxPlane(
            name=descriptor.name,
            axis="z",
            position=descriptor.position,
            sign=descriptor.direction,
            window=descriptor.window,
        )
        mon = PlaneDft(fp, grid, wavelengths, dt)
        mon.descriptor = descriptor
        return mon
    if isinstance(descriptor, PointProbe):
        return ProbeDft(descriptor, grid, wavelengths, dt)
    raise TypeError(f"unknown monitor descriptor {descriptor!r}")


def flux_spectrum(monitor) -> Spectrum:
    """Poynting flux per wavelength; outward-positive for boxes, along
    sign*axis for planes."""
    if isinstance(monitor, BoxDft):
        return Spectrum(monitor.wavelengths, monitor.flux())
    if isinstance(monitor, PlaneDft):
        sign = getattr(monitor.descriptor, "sign", None)
        if sign is None:  # CouplingPlane descriptor
            sign = monitor.descriptor.direction
        return Spectrum(monitor.wavelengths, sign * monitor.flux())
    raise TypeError("flux_spectrum needs a plane or box monitor")
