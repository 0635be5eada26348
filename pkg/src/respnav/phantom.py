"""Synthetic multi-coil raw data for the sampling schedule.

A numerical 3-D phantom built from ellipsoid components with independently
controlled motion provides ground truth for the whole pipeline. Volume axes
are (x, y, z) = (readout, phase-encode ky, phase-encode kz); anatomically the
readout axis is superior-inferior (SI) and the first phase-encode axis is
anterior-posterior (AP), matching a protocol whose central 1-D k-space lines
project onto SI. Respiration translates AP components along y and SI
components along x by an integer number of pixels (quantized sinusoid), held
constant between navigation events; cardiac components additionally pulsate
(semi-axes scaled by a raised cosine of the cardiac phase).

Rendering caches one volume per distinct motion state. To keep the cache
finite, the cardiac phase used for rendering is quantized into
`cardiac_render_levels` steps per cycle (the per-readout ground-truth cardiac
fraction stays continuous).
"""

from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import ConfigError, ConfigMismatch
from .fourier import fftc

AXIS_AP = "AP"
AXIS_SI = "SI"
AXIS_NONE = "none"

SOURCE_RESPIRATION = "respiration"
SOURCE_CARDIAC = "cardiac"


@dataclass(frozen=True)
class Ellipsoid:
    center: tuple  # (x, y, z) voxel coordinates
    semi_axes: tuple  # (a, b, c) voxels
    intensity: float


@dataclass(frozen=True)
class MotionComponent:
    ellipsoids: tuple
    motion_axis: str = AXIS_NONE  # AP -> y, SI -> x, none -> static
    motion_source: str = SOURCE_RESPIRATION
    pulsation_frac: float = 0.0  # cardiac semi-axis modulation


@dataclass(frozen=True)
class PhantomConfig:
    grid: tuple = (64, 64, 18)  # (nx, ny, nz)
    voxel_mm: float = 4.84  # 310 mm FOV / 64
    components: tuple = ()
    coils: int = 4
    noise_sigma: float = 0.0  # std of complex k-space noise per sample
    resp_period_s: float = 4.7
    resp_amp_ap_px: float = 2.0
    resp_amp_si_px: float = 1.0
    resp_drift: float = 0.0  # relative amplitude growth per second
    cardiac_period_s: float = 0.9
    cardiac_render_levels: int = 20
    seed: int = 20240601

    def validate(self):
        nx, ny, nz = self.grid
        if min(nx, ny, nz) < 8:
            raise ConfigError("phantom grid dimensions must be >= 8")
        if self.resp_period_s <= 0 or self.cardiac_period_s <= 0:
            raise ConfigError("motion periods must be positive")
        if self.cardiac_render_levels < 1:
            raise ConfigError("cardiac_render_levels must be >= 1")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")
        for comp in self.components:
            disp = np.zeros(3)
            if comp.motion_axis == AXIS_AP:
                disp[1] = abs(self.resp_amp_ap_px)
            elif comp.motion_axis == AXIS_SI:
                disp[0] = abs(self.resp_amp_si_px)
            grow = 1.0 + max(comp.pulsation_frac, 0.0)
            for ell in comp.ellipsoids:
                for ax in range(3):
                    lo = ell.center[ax] - ell.semi_axes[ax] * grow - disp[ax]
                    hi = ell.center[ax] + ell.semi_axes[ax] * grow + disp[ax]
                    if lo < 0 or hi > self.grid[ax] - 1:
                        raise ConfigError(
                            f"ellipsoid at {ell.center} leaves the grid at maximal displacement"
                        )
        return self

    def to_json_dict(self):
        return asdict(self)

    @classmethod
    def from_json_dict(cls, doc):
        comps = tuple(
            MotionComponent(
                ellipsoids=tuple(Ellipsoid(tuple(e["center"]), tuple(e["semi_axes"]), e["intensity"])
                                 for e in c["ellipsoids"]),
                motion_axis=c["motion_axis"],
                motion_source=c["motion_source"],
                pulsation_frac=c["pulsation_frac"],
            )
            for c in doc["components"]
        )
        kw = dict(doc)
        kw["grid"] = tuple(doc["grid"])
        kw["components"] = comps
        return cls(**kw)


@dataclass
class GroundTruth:
    nav_ap_px: np.ndarray  # per navigation event, integer AP shift
    nav_si_px: np.ndarray  # per navigation event, integer SI shift
    cardiac_frac: np.ndarray  # per readout, cardiac phase fraction in [0, 1)


@dataclass
class RawDataset:
    schedule: object
    phantom: PhantomConfig
    samples: np.ndarray  # (n_readouts, coils, nx) complex64
    coil_maps: np.ndarray  # (coils, nx, ny, nz) complex64
    trigger_times_s: np.ndarray
    truth: GroundTruth

    @property
    def n_coils(self):
        return self.samples.shape[1]


def respiration_shift(config, time_s):
    """Integer (AP, SI) pixel shifts of the respiration waveform at a time.

    Quantized sinusoid: round(amplitude * sin(2*pi*t/period)), rounded after
    amplitude scaling so intermediate pixel levels occur; ties follow numpy
    round (to even). An optional slow drift scales the amplitude over time.
    """
    phase = (time_s / config.resp_period_s) % 1.0
    scale = 1.0 + config.resp_drift * time_s
    s = np.sin(2 * np.pi * phase)
    ap = int(np.round(config.resp_amp_ap_px * scale * s))
    si = int(np.round(config.resp_amp_si_px * scale * s))
    return ap, si


def cardiac_waveform(phase):
    """Raised cosine in [0, 1], zero at trigger (phase 0)."""
    return 0.5 * (1.0 - np.cos(2 * np.pi * phase))


def render_shifted(config, ap_px, si_px, cardiac_c):
    """Rasterize all components at explicit displacements.

    AP components move `ap_px` along y, SI components `si_px` along x;
    cardiac components get semi-axes scaled by 1 + pulsation_frac * cardiac_c.
    """
    nx, ny, nz = config.grid
    xs = np.arange(nx)[:, None, None]
    ys = np.arange(ny)[None, :, None]
    zs = np.arange(nz)[None, None, :]
    vol = np.zeros(config.grid, dtype=float)
    for comp in config.components:
        dx = si_px if comp.motion_axis == AXIS_SI else 0
        dy = ap_px if comp.motion_axis == AXIS_AP else 0
        grow = 1.0 + comp.pulsation_frac * cardiac_c if comp.motion_source == SOURCE_CARDIAC else 1.0
        for ell in comp.ellipsoids:
            cx, cy, cz = ell.center
            a, b, c = (s * grow for s in ell.semi_axes)
            d = (((xs - (cx + dx)) / a) ** 2
                 + ((ys - (cy + dy)) / b) ** 2
                 + ((zs - cz) / c) ** 2)
            vol += ell.intensity * (d <= 1.0)
    return vol


def render_volume(config, resp_phase, cardiac_phase):
    """Volume at given waveform phases (both in cycles)."""
    s = np.sin(2 * np.pi * resp_phase)
    ap = int(np.round(config.resp_amp_ap_px * s))
    si = int(np.round(config.resp_amp_si_px * s))
    return render_shifted(config, ap, si, cardiac_waveform(cardiac_phase % 1.0))


def make_coil_maps(config):
    """Smooth complex Gaussian sensitivities at equally spaced angles.

    A single coil degenerates to a uniform unit map so single-coil tests see
    the plain phantom.
    """
    nx, ny, nz = config.grid
    n_coils = config.coils
    if n_coils == 1:
        return np.ones((1, nx, ny, nz), dtype=np.complex64)
    xs = np.arange(nx)[:, None, None]
    ys = np.arange(ny)[None, :, None]
    zs = np.arange(nz)[None, None, :]
    radius = 0.52 * max(nx, ny)
    width = 0.55 * max(nx, ny)
    maps = np.empty((n_coils, nx, ny, nz), dtype=np.complex64)
    for c in range(n_coils):
        phi = 2 * np.pi * c / n_coils
        px = nx / 2 + radius * np.cos(phi)
        py = ny / 2 + radius * np.sin(phi)
        pz = nz / 2
        d2 = (xs - px) ** 2 + (ys - py) ** 2 + ((zs - pz) * 0.5) ** 2
        mag = np.exp(-d2 / (2 * width**2))
        phase = phi + 0.35 * np.pi * (np.cos(phi) * xs / nx + np.sin(phi) * ys / ny)
        maps[c] = (mag * np.exp(1j * phase)).astype(np.complex64)
    return maps


def _noise_for(seed, readout_index, coil, nx, sigma):
    # counter-based stream per (seed, readout, coil): results independent of
    # evaluation order / parallel schedule
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, readout_index, coil])))
    re_im = rng.standard_normal(2 * nx) * (sigma / np.sqrt(2.0))
    return re_im[:nx] + 1j * re_im[nx:]


def simulate_acquisition(phantom, schedule, progress=None):
    """Forward-simulate all readouts of `schedule` on the phantom.

    Per readout: render the volume for the readout's motion state (respiration
    held at the governing navigation event, cardiac phase quantized to
    `cardiac_render_levels`), multiply by each coil map, 3-D DFT, extract the
    kx line at the readout's (ky, kz), add complex Gaussian noise of std
    noise_sigma. Volumes and their coil k-spaces are cached per motion state.
    """
    phantom.validate()
    cfg = schedule.config
    nx, ny, nz = phantom.grid
    if (nx, ny, nz) != (cfg.nx, cfg.ny, cfg.nz):
        raise ConfigMismatch(
            f"phantom grid {phantom.grid} != schedule grid {(cfg.nx, cfg.ny, cfg.nz)}"
        )
    if phantom.resp_period_s <= 2 * cfg.nav_interval_s:
        raise ConfigError("resp_period_s must exceed twice the navigation interval")

    n_readouts = len(schedule.readouts)
    coil_maps = make_coil_maps(phantom)

    # ground truth per navigation event
    nav_ap = np.empty(schedule.nav_count(), dtype=int)
    nav_si = np.empty(schedule.nav_count(), dtype=int)
    for ev in schedule.nav_events:
        nav_ap[ev.nav_id], nav_si[ev.nav_id] = respiration_shift(phantom, ev.time_s)

    times = np.array([r.time_s for r in schedule.readouts])
    cardiac_frac = (times % phantom.cardiac_period_s) / phantom.cardiac_period_s
    levels = phantom.cardiac_render_levels
    cardiac_level = np.minimum((cardiac_frac * levels).astype(int), levels - 1)

    # group readouts by motion state, render and transform each state once
    state_of = {}
    for r in schedule.readouts:
        key = (int(nav_ap[r.nav_id]), int(nav_si[r.nav_id]), int(cardiac_level[r.index]))
        state_of.setdefault(key, []).append(r.index)

    samples = np.empty((n_readouts, phantom.coils, nx), dtype=np.complex64)
    ky_idx = np.array([r.ky for r in schedule.readouts]) + ny // 2
    kz_idx = np.array([r.kz for r in schedule.readouts]) + nz // 2
    for key, indices in state_of.items():
        ap, si, level = key
        vol = render_shifted(phantom, ap, si, cardiac_waveform(level / levels))
        idx = np.asarray(indices)
        for c in range(phantom.coils):
            kvol = fftc(coil_maps[c] * vol)
            samples[idx, c, :] = kvol[:, ky_idx[idx], kz_idx[idx]].T
        if progress is not None:
            progress(len(indices))

    if phantom.noise_sigma > 0:
        for i in range(n_readouts):
            for c in range(phantom.coils):
                samples[i, c, :] += _noise_for(phantom.seed, i, c, nx, phantom.noise_sigma)

    n_triggers = int(np.floor(cfg.total_dur_s / phantom.cardiac_period_s)) + 1
    triggers = np.arange(n_triggers) * phantom.cardiac_period_s

    truth = GroundTruth(nav_ap_px=nav_ap, nav_si_px=nav_si, cardiac_frac=cardiac_frac)
    return RawDataset(schedule=schedule, phantom=phantom, samples=samples,
                      coil_maps=coil_maps, trigger_times_s=triggers, truth=truth)


def default_components():
    """Torso, anterior chest-wall band (AP) and pulsating heart (SI).

    Geometry is chosen so the chest band and the heart stay clear of static
    edges inside the default motion ROIs.
    """
    torso = MotionComponent(
        ellipsoids=(Ellipsoid((32.0, 28.0, 9.0), (26.0, 17.0, 7.5), 1.0),),
        motion_axis=AXIS_NONE,
    )
    chest = MotionComponent(
        ellipsoids=(Ellipsoid((32.0, 52.0, 9.0), (22.0, 2.5, 6.5), 1.6),),
        motion_axis=AXIS_AP,
    )
    heart = MotionComponent(
        ellipsoids=(Ellipsoid((24.0, 30.0, 9.0), (7.0, 7.0, 5.5), 1.8),),
        motion_axis=AXIS_SI,
        motion_source=SOURCE_CARDIAC,
        pulsation_frac=0.10,
    )
    return (torso, chest, heart)


def default_phantom(noise_sigma=60.0, **overrides):
    kw = dict(components=default_components(), noise_sigma=noise_sigma)
    kw.update(overrides)
    return PhantomConfig(**kw)
