"""Low-resolution 2-D navigator images.

Each navigation event's kz = 0 readouts are placed into an (nx, ny) k-space
plane (missing ky columns zero-filled), transformed per coil with the centered
2-D inverse Fourier transform and combined with the root sum of squares. The
resulting real images N_1..N_I show the projection of the volume along z,
i.e. the plane spanned by the SI (rows) and AP (columns) motion directions.
"""

from dataclasses import dataclass

import numpy as np

from .errors import MissingNavData
from .fourier import ifftc
from .sampling import ROLE_NAVIGATION


@dataclass
class NavImageSeries:
    images: np.ndarray  # (I, nx, ny) real, >= 0
    times_s: np.ndarray  # (I,)

    def __len__(self):
        return self.images.shape[0]


def assemble_nav_kspace(raw, nav_id):
    """Per-coil zero-filled (nx, ny) k-space plane of one navigation event."""
    schedule = raw.schedule
    cfg = schedule.config
    if nav_id < 0 or nav_id >= schedule.nav_count():
        raise MissingNavData(f"no navigation event {nav_id}")
    ev = schedule.nav_events[nav_id]
    indices = list(schedule.readout_indices_of_event(nav_id))
    expected = set(range(-cfg.spoke_len // 2, cfg.spoke_len // 2))
    got = {schedule.readouts[i].ky for i in indices
           if schedule.readouts[i].role == ROLE_NAVIGATION}
    if got != expected:
        raise MissingNavData(
            f"navigation event {nav_id} truncated: has {len(got)} of {len(expected)} lines"
        )
    n_coils = raw.samples.shape[1]
    plane = np.zeros((n_coils, cfg.nx, cfg.ny), dtype=np.complex128)
    for i in indices:
        r = schedule.readouts[i]
        plane[:, :, r.ky + cfg.ny // 2] = raw.samples[i]
    return plane


def reconstruct_nav_images(raw):
    """All navigator images, in acquisition order."""
    schedule = raw.schedule
    if schedule.nav_count() == 0:
        raise MissingNavData("dataset contains no navigation events")
    cfg = schedule.config
    images = np.empty((schedule.nav_count(), cfg.nx, cfg.ny))
    times = np.empty(schedule.nav_count())
    for ev in schedule.nav_events:
        plane = assemble_nav_kspace(raw, ev.nav_id)
        coil_imgs = ifftc(plane, axes=(1, 2))
        images[ev.nav_id] = np.sqrt((np.abs(coil_imgs) ** 2).sum(axis=0))
        times[ev.nav_id] = ev.time_s
    return NavImageSeries(images=images, times_s=times)
