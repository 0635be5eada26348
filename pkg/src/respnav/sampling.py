"""Adapted continuous sampling schedule.

The Cartesian phase-encode (ky, kz) plane is covered by pseudo-spiral spokes
(straight golden-angle-rotated rays with radius linear in the sample index,
rasterized to the integer lattice). Every `nav_interval_s` seconds a 2-D
navigation block is inserted: `spoke_len` readouts on the kz = 0 line covering
ky = -u/2 .. u/2-1, which together with the fully sampled kx lines yields a
fully sampled u-by-nx k-space center. Navigation blocks never interrupt a
spoke in progress; the spoke completes first.

Every readout is tagged with the id of the most recent navigation event at or
before its own timestamp, i.e. all readouts between navigation signal i and
i+1 share motion state i.
"""

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import ConfigError, EmptyBin

ROLE_IMAGING = "imaging"
ROLE_NAVIGATION = "navigation"

GOLDEN_ANGLE = 2.39996


@dataclass(frozen=True)
class PatternConfig:
    """Geometry and timing of the sampling pattern.

    ny, nz are the phase-encode grid dimensions, nx the samples per
    frequency-encode line. spoke_len is both the samples per pseudo-spiral
    spoke and the number of ky lines in a navigation block (u).
    """

    ny: int = 64
    nz: int = 18
    nx: int = 64
    spoke_len: int = 16
    nav_interval_s: float = 1.0
    tr_s: float = 0.0033
    total_dur_s: float = 48.0
    spoke_angle_increment: float = GOLDEN_ANGLE
    seed: int = 1234

    def validate(self):
        for name in ("ny", "nz", "nx", "spoke_len"):
            v = getattr(self, name)
            if v < 8 or v % 2 != 0:
                raise ConfigError(f"{name}={v} must be even and >= 8")
        if self.spoke_len > self.ny:
            raise ConfigError("spoke_len must not exceed ny (navigation line spans ky)")
        if self.nav_interval_s < self.spoke_len * self.tr_s:
            raise ConfigError("nav_interval_s too short to fit one navigation block")
        if self.tr_s <= 0 or self.total_dur_s <= 0:
            raise ConfigError("tr_s and total_dur_s must be positive")
        return self


@dataclass(frozen=True)
class ReadoutDescriptor:
    index: int
    time_s: float
    ky: int
    kz: int
    role: str
    nav_id: int


@dataclass(frozen=True)
class NavEvent:
    nav_id: int
    start_index: int
    end_index: int  # inclusive
    time_s: float


@dataclass
class SamplingSchedule:
    config: PatternConfig
    readouts: list
    nav_events: list = field(default_factory=list)

    def __len__(self):
        return len(self.readouts)

    def nav_count(self):
        return len(self.nav_events)

    def readout_indices_of_event(self, nav_id):
        ev = self.nav_events[nav_id]
        return range(ev.start_index, ev.end_index + 1)

    def to_json_dict(self):
        return {
            "config": asdict(self.config),
            "readouts": [asdict(r) for r in self.readouts],
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, doc):
        config = PatternConfig(**doc["config"])
        readouts = [ReadoutDescriptor(**r) for r in doc["readouts"]]
        return cls(config=config, readouts=readouts, nav_events=_collect_nav_events(readouts))


def _collect_nav_events(readouts):
    events = []
    for r in readouts:
        if r.role != ROLE_NAVIGATION:
            continue
        if events and events[-1].nav_id == r.nav_id:
            ev = events[-1]
            events[-1] = NavEvent(ev.nav_id, ev.start_index, r.index, ev.time_s)
        else:
            events.append(NavEvent(r.nav_id, r.index, r.index, r.time_s))
    return events


def _clamp(v, n):
    return int(min(max(v, -n // 2), n // 2 - 1))


def generate_spoke(spoke_index, config):
    """Integer (ky, kz) coordinates of one pseudo-spiral spoke.

    The spoke is a ray at azimuth spoke_index * spoke_angle_increment with
    radius r(s) = s * (ny/2 - 1) / (spoke_len - 1), rounded to the lattice
    (numpy round, ties to even). On anisotropic grids the kz component is
    scaled by nz/ny so the ray stays inside the shorter axis. Coordinates are
    clamped into grid bounds; a duplicate after rounding advances along the
    ray direction to the nearest unused lattice point.
    """
    if spoke_index < 0:
        raise ConfigError("spoke_index must be >= 0")
    theta = spoke_index * config.spoke_angle_increment
    rmax = config.ny / 2 - 1
    dy = np.cos(theta)
    dz = np.sin(theta) * (config.nz / config.ny)
    used = set()
    pts = []
    for s in range(config.spoke_len):
        r = s * rmax / (config.spoke_len - 1)
        p = (_clamp(np.round(r * dy), config.ny), _clamp(np.round(r * dz), config.nz))
        t = r
        steps = 0
        while p in used:
            t += 0.5
            steps += 1
            p = (_clamp(np.round(t * dy), config.ny), _clamp(np.round(t * dz), config.nz))
            if steps > 4 * (config.ny + config.nz):
                p = _nearest_unused(p, used, config)
                break
        used.add(p)
        pts.append(p)
    return pts


def _nearest_unused(p, used, config):
    # fallback when the ray is exhausted at the grid edge: closest free
    # lattice point, deterministic order
    for radius in range(1, max(config.ny, config.nz)):
        ring = []
        for a in range(-radius, radius + 1):
            for b in range(-radius, radius + 1):
                if max(abs(a), abs(b)) != radius:
                    continue
                q = (_clamp(p[0] + a, config.ny), _clamp(p[1] + b, config.nz))
                if q not in used:
                    ring.append((a * a + b * b, q))
        if ring:
            return min(ring)[1]
    raise ConfigError("phase-encode grid exhausted while placing spoke samples")


def generate_schedule(config):
    """Build the full time-ordered schedule for `config`.

    Readouts advance by tr_s each; a navigation block starts at the first
    readout slot at or after each multiple of nav_interval_s, except that a
    spoke in progress completes first and a block is only emitted when all of
    its spoke_len readouts still fit before the end of the scan.
    """
    config.validate()
    n_total = int(np.floor(config.total_dur_s / config.tr_s))
    if n_total < config.spoke_len:
        raise ConfigError("scan too short for a single navigation block")
    u = config.spoke_len
    readouts = []
    nav_events = []
    index = 0
    spoke_index = 0
    next_nav_multiple = 0

    def emit(ky, kz, role, nav_id):
        nonlocal index
        readouts.append(
            ReadoutDescriptor(index=index, time_s=index * config.tr_s, ky=ky, kz=kz,
                              role=role, nav_id=nav_id)
        )
        index += 1

    while index < n_total:
        t = index * config.tr_s
        if t >= next_nav_multiple * config.nav_interval_s and index + u <= n_total:
            nav_id = len(nav_events)
            start = index
            for ky in range(-u // 2, u // 2):
                emit(ky, 0, ROLE_NAVIGATION, nav_id)
            nav_events.append(NavEvent(nav_id, start, index - 1, start * config.tr_s))
            next_nav_multiple = int(np.floor(start * config.tr_s / config.nav_interval_s)) + 1
        else:
            if t >= next_nav_multiple * config.nav_interval_s:
                # tail of the scan: no room for a full block, fill with spokes
                next_nav_multiple = n_total  # stop trying
            nav_id = len(nav_events) - 1
            for ky, kz in generate_spoke(spoke_index, config):
                if index >= n_total:
                    break
                emit(ky, kz, ROLE_IMAGING, nav_id)
            spoke_index += 1
    return SamplingSchedule(config=config, readouts=readouts, nav_events=nav_events)


def undersampling_report(schedule, bins=None):
    """Acceleration factors R = ny*nz / distinct sampled (ky, kz) cells.

    Without `bins` the report carries a single "overall" entry over all
    readouts. With a BinSelection the report is restricted to its selected
    readouts and additionally split per cardiac phase.
    """
    cfg = schedule.config
    total_cells = cfg.ny * cfg.nz

    def r_factor(indices):
        if not indices:
            raise EmptyBin("phase has zero readouts")
        cells = {(schedule.readouts[i].ky, schedule.readouts[i].kz) for i in indices}
        return total_cells / len(cells)

    report = {"total_cells": total_cells, "phases": {}, "overall": None}
    if bins is None:
        report["overall"] = r_factor(list(range(len(schedule.readouts))))
        return report

    selected = list(bins.selected_readouts)
    report["overall"] = r_factor(selected)
    by_phase = {}
    for i in selected:
        by_phase.setdefault(bins.cardiac_phase_of_readout[i], []).append(i)
    for phase in sorted(by_phase):
        report["phases"][phase] = r_factor(by_phase[phase])
    report["fraction_selected"] = bins.fraction_selected
    return report
