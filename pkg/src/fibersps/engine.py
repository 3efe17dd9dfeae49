"""Leapfrog time stepping of Maxwell's equations.

Natural units: lengths nm, c = eps0 = mu0 = 1.  One step advances

    H^(n+1/2) = H^(n-1/2) - dt curl_kappa(E^n) - dt psi_H
    E^(n+1)   = E^n + CB [curl_kappa(H^(n+1/2)) + psi_E - J]

where CB = dt/eps per edge, psi are the CPML recursive convolutions and
J collects the dispersive-gold currents (auxiliary differential
equations, explicit half-step form) plus the soft dipole drive.

Gold edges integrate a Drude current J_D at half steps and one
polarization P per Lorentz pole at integer steps:

    J_D <- k_a J_D + k_b E^n
    P^(n+1) = c1 P^n + c2 P^(n-1) + c3 E^n ;  J_L = (P^(n+1)-P^n)/dt

All per-cell updates are element-wise, so results are independent of
any scheduling; monitor reductions run in numpy with a fixed order,
which makes repeated runs bit-identical.
"""

from __future__ import annotations

import time as _time
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .cpml import CpmlParams, axis_profiles
from .exceptions import GridMismatchError, NonFiniteFieldError, NotConvergedWarning
from .geometry import MaterialMap, SceneConfig, rasterize
from .grid import YeeGrid, courant_dt
from .monitors import (
    BoxDft,
    DftMonitor,
    PlaneDft,
    ProbeDft,
    SourceDft,
    Spectrum,
    build_monitor,
)
from .sources import DipoleSource

# (field component, derivative axis, source component, sign) for each
# curl term, e.g. ("x", "y", "z", +1) reads (curl F)_x += d F_z / dy
_CURL_TERMS = (
    ("x", "y", "z", +1.0),
    ("x", "z", "y", -1.0),
    ("y", "z", "x", +1.0),
    ("y", "x", "z", -1.0),
    ("z", "x", "y", +1.0),
    ("z", "y", "x", -1.0),
)
_AX = {"x": 0, "y": 1, "z": 2}


@dataclass
class FieldState:
    """Yee-grid field arrays plus dispersive auxiliary state."""

    grid: YeeGrid
    dt: float
    E: dict
    H: dict
    aux: dict = field(default_factory=dict)
    step_index: int = 0

    @classmethod
    def zeros(cls, grid: YeeGrid, dt: float, dtype=np.float32) -> "FieldState":
        E = {c: np.zeros(grid.shape, dtype=dtype) for c in "xyz"}
        H = {c: np.zeros(grid.shape, dtype=dtype) for c in "xyz"}
        return cls(grid=grid, dt=dt, E=E, H=H)

    @property
    def time_e(self) -> float:
        """Time of the stored E fields (internal nm units)."""
        return self.step_index * self.dt

    @property
    def time_h(self) -> float:
        """Time of the stored H fields (staggered half step)."""
        return (self.step_index - 0.5) * self.dt

    def is_finite(self) -> bool:
        return all(np.isfinite(a).all() for a in self.E.values())


class _Psi:
    """One CPML convolution slab (one curl term, one side).

    ``region`` restricts the correction to exactly the cells the bulk
    update touches (keeps the tangential wall fields at zero);
    ``shifted`` is the same region displaced by ``shift`` along the
    derivative axis, giving the other finite-difference operand.
    """

    __slots__ = ("arr", "region", "shifted", "b", "a")

    def __init__(self, shape, region, rng, shift, b, a, axis, dtype):
        bshape = [1, 1, 1]
        bshape[axis] = rng.stop - rng.start
        self.b = b[rng].reshape(bshape).astype(dtype)
        self.a = a[rng].reshape(bshape).astype(dtype)
        self.region = tuple(region)
        sh = list(region)
        sh[axis] = slice(rng.start + shift, rng.stop + shift)
        self.shifted = tuple(sh)
        self.arr = np.zeros([s.stop - s.start if s != slice(None) else shape[i]
                             for i, s in enumerate(region)], dtype=dtype)


def _full_region(rng, axis, limits):
    """Region covering ``rng`` along ``axis`` and ``limits`` elsewhere."""
    region = []
    for a in range(3):
        if a == axis:
            region.append(rng)
        else:
            lo, hi = limits[a]
            region.append(slice(lo, hi))
    return region


class _CpmlState:
    """psi slabs and coefficient profiles for all 12 curl terms."""

    def __init__(self, params: CpmlParams, grid: YeeGrid, dt: float, dtype):
        self.params = params
        npml = params.thickness
        self.inv_e = {}
        self.inv_h = {}
        prof = {}
        for ax in "xyz":
            ie, ih, be, ae, bh, ah = axis_profiles(params, grid, _AX[ax], dt)
            self.inv_e[ax] = ie.astype(dtype)
            self.inv_h[ax] = ih.astype(dtype)
            prof[ax] = (be, ae, bh, ah)
        self.inv_h_raw = dtype(1.0 / grid.resolution)
        # E-side diffs live at integer positions r in [1, n); H-side at
        # half positions r+1/2 with r in [0, n-1).  The bulk E update
        # covers indices >= 1 along both curl axes; the H update covers
        # indices < n-1 along both curl axes.
        self.e_terms = []
        self.h_terms = []
        ext = grid.extent
        for comp, dax, src, sign in _CURL_TERMS:
            ax = _AX[dax]
            n = ext[ax]
            be, ae, bh, ah = prof[dax]
            other = next(a for a in range(3) if a != _AX[comp] and a != ax)
            e_limits = {other: (1, ext[other]), _AX[comp]: (0, ext[_AX[comp]])}
            h_limits = {other: (0, ext[other] - 1), _AX[comp]: (0, ext[_AX[comp]])}
            for rng in (slice(1, npml), slice(n - npml, n)):
                region = _full_region(rng, ax, e_limits)
                self.e_terms.append(
                    (comp, ax, src, sign, _Psi(ext, region, rng, -1, be, ae, ax, dtype))
                )
            for rng in (slice(0, npml), slice(n - 1 - npml, n - 1)):
                region = _full_region(rng, ax, h_limits)
                self.h_terms.append(
                    (comp, ax, src, sign, _Psi(ext, region, rng, +1, bh, ah, ax, dtype))
                )

    def apply_h(self, E, H, dt):
        """Update psi_H from E^n and apply the corrections to H."""
        for comp, ax, src, sign, psi in self.h_terms:
            f = E[src]
            diff = (f[psi.shifted] - f[psi.region]) * self.inv_h_raw
            psi.arr *= psi.b
            psi.arr += psi.a * diff
            H[comp][psi.region] -= (dt * sign) * psi.arr

    def apply_e(self, E, H, CB):
        """Update psi_E from H^(n+1/2) and apply the corrections to E."""
        for comp, ax, src, sign, psi in self.e_terms:
            f = H[src]
            diff = (f[psi.region] - f[psi.shifted]) * self.inv_h_raw
            psi.arr *= psi.b
            psi.arr += psi.a * diff
            E[comp][psi.region] += sign * CB[comp][psi.region] * psi.arr


class _GoldState:
    """Auxiliary currents on the staircased gold edges of one component."""

    def __init__(self, mask: np.ndarray, model, dt: float):
        self.idx = np.nonzero(mask)
        n = len(self.idx[0])
        self.n = n
        wp, gd = model.drude_rad_per_nm()
        self.k_a = (1.0 - gd * dt / 2.0) / (1.0 + gd * dt / 2.0)
        self.k_b = wp**2 * dt / (1.0 + gd * dt / 2.0)
        self.j_d = np.zeros(n)
        self.poles = []
        for de, w0, g in model.poles_rad_per_nm():
            c1 = (2.0 - w0**2 * dt**2) / (1.0 + g * dt / 2.0)
            c2 = -(1.0 - g * dt / 2.0) / (1.0 + g * dt / 2.0)
            c3 = de * w0**2 * dt**2 / (1.0 + g * dt / 2.0)
            self.poles.append([c1, c2, c3, np.zeros(n), np.zeros(n)])  # c1,c2,c3,P,P_prev
        self.dt = dt

    def advance_currents(self, e_arr: np.ndarray) -> np.ndarray:
        """Advance J_D and the Lorentz P's with E^n; return the total
        current to subtract in the E update."""
        e_old = e_arr[self.idx].astype(np.float64)
        self.j_d = self.k_a * self.j_d + self.k_b * e_old
        j_total = self.j_d.copy()
        for pole in self.poles:
            c1, c2, c3, p, p_prev = pole
            p_next = c1 * p + c2 * p_prev + c3 * e_old
            j_total += (p_next - p) / self.dt
            pole[4] = p
            pole[3] = p_next
        return j_total


class Simulation:
    """One FDTD run bound to a SceneConfig.

    A Simulation owns its FieldState; runs are independent and safe to
    execute concurrently in separate instances.
    """

    def __init__(
        self,
        scene: SceneConfig,
        *,
        dtype=np.float32,
        cpml: Optional[CpmlParams] = None,
        materials: Optional[MaterialMap] = None,
        check_every: int = 25,
    ):
        self.scene = scene
        self.grid = scene.grid
        self.dtype = dtype
        self.dt = courant_dt(self.grid, scene.courant_safety)
        self.materials = materials if materials is not None else rasterize(scene)
        if self.materials.grid.shape != self.grid.shape:
            raise GridMismatchError("material map grid does not match the scene grid")
        self.cpml_params = cpml or CpmlParams(thickness=scene.cpml_cells)
        self.state = FieldState.zeros(self.grid, self.dt, dtype)
        self.CB = {}
        for c in "xyz":
            cb = self.dt / self.materials.eps[c].astype(np.float64)
            cb[self.materials.gold[c]] = self.dt / scene.gold_model.eps_inf
            self.CB[c] = cb.astype(dtype)
        self.cpml = _CpmlState(self.cpml_params, self.grid, self.dt, dtype)
        self.gold = {}
        for c in "xyz":
            if self.materials.gold[c].any():
                self.gold[c] = _GoldState(self.materials.gold[c], scene.gold_model, self.dt)
        self.state.aux = self.gold
        self._setup_source(scene.dipole)
        self.monitors: dict[str, DftMonitor] = {}
        for desc in scene.monitors:
            self.monitors[desc.name] = build_monitor(desc, self.grid, scene.wavelengths, self.dt)
        self._source_monitor = next(
            (m for m in self.monitors.values() if isinstance(m, SourceDft)), None
        )
        self.check_every = check_every
        self.energy_history: list[tuple[int, float]] = []
        self.peak_energy = 0.0

    def _setup_source(self, dipole: DipoleSource):
        self.dipole = dipole
        self._src = dipole.edge_weights(self.grid)
        self._inv_cell = 1.0 / self.grid.resolution**3
        # CB at the source edges, gathered once
        self._src_cb = {
            c: self.CB[c][idx[:, 0], idx[:, 1], idx[:, 2]].astype(np.float64)
            for c, (idx, w) in self._src.items()
        }

    def _gather_source_e(self) -> float:
        total = 0.0
        for c, (idx, w) in self._src.items():
            arr = self.state.E[c]
            total += float(np.dot(arr[idx[:, 0], idx[:, 1], idx[:, 2]].astype(np.float64), w))
        return total

    def step_once(self):
        st = self.state
        E, H = st.E, st.H
        dt = st.dt
        n = st.step_index

        e_src_old = self._gather_source_e() if self._source_monitor is not None else 0.0

        # H: (n-1/2) -> (n+1/2)
        self.cpml.apply_h(E, H, self.dtype(dt))
        kernels.update_h(
            E["x"], E["y"], E["z"], H["x"], H["y"], H["z"],
            self.cpml.inv_h["x"], self.cpml.inv_h["y"], self.cpml.inv_h["z"],
            self.dtype(dt),
        )

        # dispersive currents from E^n (before the E update)
        gold_j = {c: g.advance_currents(E[c]) for c, g in self.gold.items()}

        # E: n -> n+1
        kernels.update_e(
            E["x"], E["y"], E["z"], H["x"], H["y"], H["z"],
            self.CB["x"], self.CB["y"], self.CB["z"],
            self.cpml.inv_e["x"], self.cpml.inv_e["y"], self.cpml.inv_e["z"],
        )
        self.cpml.apply_e(E, H, self.CB)
        for c, j in gold_j.items():
            g = self.gold[c]
            E[c][g.idx] -= (self.dt / self.scene.gold_model.eps_inf) * j.astype(
                E[c].dtype.type, copy=False
            )

        # soft dipole: additive current at (n+1/2) dt
        t_mid = (n + 0.5) * dt
        current = float(self.dipole.pulse.current(t_mid))
        if self.dipole.soft:
            if current != 0.0:
                for c, (idx, w) in self._src.items():
                    E[c][idx[:, 0], idx[:, 1], idx[:, 2]] -= (
                        self._src_cb[c] * (current * self._inv_cell) * w
                    ).astype(E[c].dtype.type, copy=False)
        else:
            for c, (idx, w) in self._src.items():
                E[c][idx[:, 0], idx[:, 1], idx[:, 2]] = (current * w).astype(
                    E[c].dtype.type, copy=False
                )

        st.step_index = n + 1

        if self._source_monitor is not None:
            e_mid = 0.5 * (e_src_old + self._gather_source_e())
            self._source_monitor.add_sample(e_mid, current, t_mid)
        for mon in self.monitors.values():
            if not isinstance(mon, SourceDft):
                mon.accumulate(st)

    def interior_energy(self) -> float:
        margin = self.cpml_params.thickness
        return kernels.field_energy(
            [*self.state.E.values(), *self.state.H.values()], margin
        )

    def run(self, progress: bool = False) -> "MonitorSet":
        scene = self.scene
        t0 = _time.perf_counter()
        src_end = self.dipole.pulse.end_time
        terminated_by = "step_cap"
        while self.state.step_index < scene.max_steps:
            self.step_once()
            n = self.state.step_index
            if n % self.check_every == 0:
                en = self.interior_energy()
                if not np.isfinite(en):
                    raise NonFiniteFieldError(f"field energy non-finite at step {n}")
                self.energy_history.append((n, en))
                self.peak_energy = max(self.peak_energy, en)
                if progress and n % (self.check_every * 40) == 0:
                    print(f"  step {n}: energy {en:.3e} (peak {self.peak_energy:.3e})", flush=True)
                if (
                    self.state.time_e > src_end
                    and self.peak_energy > 0.0
                    and en < scene.decay_threshold * self.peak_energy
                ):
                    terminated_by = "decay"
                    break
        if terminated_by == "step_cap":
            warnings.warn(
                f"run '{scene.name}' hit the step cap ({scene.max_steps})", NotConvergedWarning
            )
        meta = {
            "name": scene.name,
            "steps": self.state.step_index,
            "dt": self.dt,
            "resolution": self.grid.resolution,
            "terminated_by": terminated_by,
            "converged": terminated_by == "decay",
            "peak_energy": self.peak_energy,
            "final_energy": self.energy_history[-1][1] if self.energy_history else 0.0,
            "wall_seconds": _time.perf_counter() - t0,
            "dipole_position": tuple(self.dipole.position),
            "dipole_orientation": tuple(self.dipole.orientation),
            "d": scene.d,
            "L": scene.L,
            "energy_history": self.energy_history,
        }
        return MonitorSet.from_simulation(self, meta)


# ---------------------------------------------------------------------------
# results container
# ---------------------------------------------------------------------------


@dataclass
class PlaneFields:
    """Accumulated tangential DFT fields of one plane (cacheable)."""

    name: str
    wavelengths: np.ndarray
    axis: str
    position: float
    sign: int
    resolution: float
    coords1: np.ndarray
    coords2: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    h1: np.ndarray
    h2: np.ndarray

    def flux(self) -> np.ndarray:
        s = np.real(self.e1 * np.conj(self.h2) - self.e2 * np.conj(self.h1))
        return s.sum(axis=(1, 2)) * self.resolution**2 / np.pi

    def flux_spectrum(self) -> Spectrum:
        return Spectrum(self.wavelengths, self.sign * self.flux())


@dataclass
class BoxFields:
    name: str
    wavelengths: np.ndarray
    faces: list

    def flux_spectrum(self) -> Spectrum:
        total = np.zeros(len(self.wavelengths))
        for f in self.faces:
            total += f.sign * f.flux()
        return Spectrum(self.wavelengths, total)


@dataclass
class SourcePowerResult:
    name: str
    wavelengths: np.ndarray
    acc_e: np.ndarray
    acc_i: np.ndarray

    def power_spectrum(self) -> Spectrum:
        return Spectrum(self.wavelengths, -np.real(self.acc_e * np.conj(self.acc_i)) / np.pi)


@dataclass
class ProbeResult:
    name: str
    wavelengths: np.ndarray
    e_phasor: np.ndarray  # (n_wavelengths, 3)


def _monitor_result(mon: DftMonitor):
    if isinstance(mon, SourceDft):
        return SourcePowerResult(mon.name, mon.wavelengths, mon.acc_e.copy(), mon.acc_i.copy())
    if isinstance(mon, BoxDft):
        return BoxFields(
            mon.name, mon.wavelengths, [_monitor_result(f) for f in mon.faces]
        )
    if isinstance(mon, PlaneDft):
        sign = getattr(mon.descriptor, "sign", None)
        if sign is None:
            sign = mon.descriptor.direction
        return PlaneFields(
            name=mon.name,
            wavelengths=mon.wavelengths,
            axis=mon.axis_name,
            position=mon.position,
            sign=sign,
            resolution=mon.grid.resolution,
            coords1=mon.coords1,
            coords2=mon.coords2,
            e1=mon.e1,
            e2=mon.e2,
            h1=mon.h1,
            h2=mon.h2,
        )
    if isinstance(mon, ProbeDft):
        return ProbeResult(mon.name, mon.wavelengths, mon.acc.copy())
    raise TypeError(f"no result mapping for {type(mon)}")


class MonitorSet:
    """Immutable bundle of monitor results plus run metadata."""

    def __init__(self, wavelengths, results: dict, meta: dict):
        self.wavelengths = np.asarray(wavelengths, dtype=float)
        self.results = results
        self.meta = meta

    @classmethod
    def from_simulation(cls, sim: Simulation, meta: dict) -> "MonitorSet":
        results = {name: _monitor_result(m) for name, m in sim.monitors.items()}
        return cls(sim.scene.wavelengths, results, meta)

    def __getitem__(self, name):
        return self.results[name]

    def __contains__(self, name):
        return name in self.results

    def flux(self, name) -> Spectrum:
        return self.results[name].flux_spectrum()

    def source_power(self, name: str = "source") -> Spectrum:
        return self.results[name].power_spectrum()

    def save_npz(self, path):
        import json

        payload = {}
        manifest = {"meta": _json_safe(self.meta), "monitors": {}}
        payload["wavelengths"] = self.wavelengths
        for name, res in self.results.items():
            info, arrays = _serialize_result(res)
            manifest["monitors"][name] = info
            for k, v in arrays.items():
                payload[f"{name}::{k}"] = v
        payload["manifest"] = np.frombuffer(
            json.dumps(manifest).encode("utf-8"), dtype=np.uint8
        )
        np.savez_compressed(path, **payload)

    @classmethod
    def load_npz(cls, path) -> "MonitorSet":
        import json

        with np.load(path) as data:
            manifest = json.loads(bytes(data["manifest"]).decode("utf-8"))
            wavelengths = data["wavelengths"]
            results = {}
            for name, info in manifest["monitors"].items():
                arrays = {
                    k.split("::", 1)[1]: data[k]
                    for k in data.files
                    if k.startswith(name + "::")
                }
                results[name] = _deserialize_result(info, arrays, wavelengths)
        return cls(wavelengths, results, manifest["meta"])


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _serialize_result(res):
    if isinstance(res, PlaneFields):
        info = {
            "kind": "plane",
            "axis": res.axis,
            "position": res.position,
            "sign": res.sign,
            "resolution": res.resolution,
        }
        arrays = {
            "coords1": res.coords1,
            "coords2": res.coords2,
            "e1": res.e1,
            "e2": res.e2,
            "h1": res.h1,
            "h2": res.h2,
        }
        return info, arrays
    if isinstance(res, BoxFields):
        info = {"kind": "box", "faces": []}
        arrays = {}
        for i, f in enumerate(res.faces):
            finfo, farr = _serialize_result(f)
            finfo["name"] = f.name
            info["faces"].append(finfo)
            for k, v in farr.items():
                arrays[f"face{i}.{k}"] = v
        return info, arrays
    if isinstance(res, SourcePowerResult):
        return {"kind": "source"}, {"acc_e": res.acc_e, "acc_i": res.acc_i}
    if isinstance(res, ProbeResult):
        return {"kind": "probe"}, {"e_phasor": res.e_phasor}
    raise TypeError(f"cannot serialize {type(res)}")


def _deserialize_result(info, arrays, wavelengths, name="?"):
    kind = info["kind"]
    if kind == "plane":
        return PlaneFields(
            name=info.get("name", name),
            wavelengths=wavelengths,
            axis=info["axis"],
            position=info["position"],
            sign=info["sign"],
            resolution=info["resolution"],
            coords1=arrays["coords1"],
            coords2=arrays["coords2"],
            e1=arrays["e1"],
            e2=arrays["e2"],
            h1=arrays["h1"],
            h2=arrays["h2"],
        )
    if kind == "box":
        faces = []
        for i, finfo in enumerate(info["faces"]):
            farr = {
                k.split(".", 1)[1]: v for k, v in arrays.items() if k.startswith(f"face{i}.")
            }
            faces.append(_deserialize_result(finfo, farr, wavelengths))
        return BoxFields(info.get("name", name), wavelengths, faces)
    if kind == "source":
        return SourcePowerResult(name, wavelengths, arrays["acc_e"], arrays["acc_i"])
    if kind == "probe":
        return ProbeResult(name, wavelengths, arrays["e_phasor"])
    raise TypeError(f"cannot deserialize kind {kind}")


# ---------------------------------------------------------------------------
# module-level operation contracts
# ---------------------------------------------------------------------------


def run(scene: SceneConfig, *, dtype=np.float32, progress: bool = False) -> MonitorSet:
    """Build a Simulation for the scene and advance it until the total
    interior field energy falls below ``scene.decay_threshold`` of its
    peak (after source ring-down) or ``scene.max_steps`` is hit; the
    step cap raises NotConvergedWarning and flags meta['converged']."""
    sim = Simulation(scene, dtype=dtype)
    return sim.run(progress=progress)


def step(
    state: FieldState,
    materials: MaterialMap,
    cpml: CpmlParams,
    sources: list,
) -> FieldState:
    """Advance a FieldState by one leapfrog cycle (contract form).

    Builds (and caches on ``materials``) a Simulation around the given
    state.  Prefer Simulation for long runs.
    """
    key = (id(state), tuple(id(s) for s in sources), cpml)
    cached = getattr(materials, "_step_engine", None)
    if cached is None or cached[0] != key:
        if len(sources) != 1:
            raise ValueError("exactly one dipole source is supported")
        if materials.grid.shape != state.E["x"].shape:
            raise GridMismatchError("state and materials grids differ")
        scene = SceneConfig(
            grid=materials.grid,
            shapes=[],
            dipole=sources[0],
            monitors=[],
            cpml_cells=cpml.thickness,
        )
        sim = Simulation.__new__(Simulation)
        sim.scene = scene
        sim.grid = materials.grid
        sim.dtype = state.E["x"].dtype.type
        sim.dt = state.dt
        sim.materials = materials
        sim.cpml_params = cpml
        sim.state = state
        sim.CB = {}
        for c in "xyz":
            cb = state.dt / materials.eps[c].astype(np.float64)
            cb[materials.gold[c]] = state.dt / scene.gold_model.eps_inf
            sim.CB[c] = cb.astype(sim.dtype)
        sim.cpml = _CpmlState(cpml, materials.grid, state.dt, sim.dtype)
        sim.gold = {
            c: _GoldState(materials.gold[c], scene.gold_model, state.dt)
            for c in "xyz"
            if materials.gold[c].any()
        }
        state.aux = sim.gold
        sim._setup_source(sources[0])
        sim.monitors = {}
        sim._source_monitor = None
        sim.check_every = 1
        sim.energy_history = []
        sim.peak_energy = 0.0
        materials._step_engine = (key, sim)
        cached = materials._step_engine
    sim = cached[1]
    sim.step_once()
    if state.step_index % 50 == 0 and not state.is_finite():
        raise NonFiniteFieldError("field blow-up detected")
    return state
