"""Cardiac-phase-resolved reconstruction from selected readouts.

Two modes: plain zero-filled adjoint (inverse FT of the gridded k-space,
sum-of-squares over coils) and a simplified compressed-sensing scheme that
minimizes  0.5 * ||M F x - y||^2 + lambda * ||W x||_1  per phase and coil by
proximal gradient descent: a unit gradient step on data consistency in the
unitary FT convention, followed by soft thresholding of orthogonal wavelet
coefficients. Coils are reconstructed independently and combined with the
root sum of squares; no sensitivity maps are used.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptyPhase
from .fourier import fftc_ortho, ifftc, ifftc_ortho
from . import wavelet

MODE_ZERO_FILLED = "zf"
MODE_CS_WAVELET = "cs"


@dataclass(frozen=True)
class ReconParams:
    mode: str = MODE_CS_WAVELET
    lambda_rel: float = 0.01  # threshold relative to max |W x_zf| per phase/coil
    iterations: int = 30
    wavelet_name: str = "db4"
    wavelet_levels: int = 3

    def validate(self):
        if self.mode not in (MODE_ZERO_FILLED, MODE_CS_WAVELET):
            raise ConfigError(f"unknown recon mode {self.mode!r}")
        if self.iterations < 1 or self.lambda_rel < 0:
            raise ConfigError("bad recon parameters")
        return self


@dataclass
class VolumeSeries:
    volumes: np.ndarray  # (P, nx, ny, nz) float32 magnitude
    mode: str
    meta: dict = field(default_factory=dict)

    @property
    def phases(self):
        return self.volumes.shape[0]


def grid_adjoint(raw, readout_indices, phase_of_readout, phases):
    """Accumulate selected readouts onto per-phase Cartesian k-space grids.

    Returns (kgrids, masks, counts): kgrids has shape (P, coils, nx, ny, nz)
    with each cell averaged over its hits, masks/counts are (P, ny, nz) over
    the phase-encode plane (every hit carries a full kx line).
    """
    cfg = raw.schedule.config
    nx, ny, nz = cfg.nx, cfg.ny, cfg.nz
    n_coils = raw.samples.shape[1]
    kgrids = np.zeros((phases, n_coils, nx, ny, nz), dtype=np.complex128)
    counts = np.zeros((phases, ny, nz), dtype=np.int64)
    for i in readout_indices:
        r = raw.schedule.readouts[i]
        p = phase_of_readout[i]
        iy, iz = r.ky + ny // 2, r.kz + nz // 2
        kgrids[p, :, :, iy, iz] += raw.samples[i]
        counts[p, iy, iz] += 1
    empty = [p for p in range(phases) if counts[p].sum() == 0]
    if empty:
        raise EmptyPhase(f"cardiac phases without readouts: {empty}")
    hit = counts > 0
    for p in range(phases):
        kgrids[p, :, :, hit[p]] /= counts[p][hit[p]]
    return kgrids, hit, counts


def _ista(y, mask, params, log):
    """Proximal gradient iterations for one phase and coil.

    Operates in the unitary FT convention so the masked-FT operator has unit
    spectral norm and the step size is 1.
    """
    name, levels = params.wavelet_name, params.wavelet_levels
    x = ifftc_ortho(y)  # zero-filled start: data-consistency gradient is zero here
    coeffs = wavelet.decompose(x, name, levels)
    lam = params.lambda_rel * np.abs(coeffs).max()

    def objective(xc, wc):
        resid = mask * fftc_ortho(xc) - y
        return 0.5 * float(np.vdot(resid, resid).real) + lam * float(np.abs(wc).sum())

    log.append(objective(x, coeffs))
    for _ in range(params.iterations):
        grad = ifftc_ortho(mask * fftc_ortho(x) - y)
        coeffs = wavelet.decompose(x - grad, name, levels)
        if lam > 0:
            coeffs = wavelet.soft_threshold(coeffs, lam)
        x = wavelet.reconstruct(coeffs, name, levels)
        log.append(objective(x, coeffs))
    return x


def reconstruct(raw, bins, params=ReconParams()):
    """Reconstruct the cardiac-phase series for a bin selection."""
    params.validate()
    cfg = raw.schedule.config
    phases = bins.phases
    kgrids, masks, counts = grid_adjoint(raw, bins.selected_readouts,
                                         bins.cardiac_phase_of_readout, phases)
    n_coils = kgrids.shape[1]
    # measured data rescaled into the unitary FT convention; the zero-filled
    # start F_o^{-1}(y) then equals ifftc of the gridded k-space, so both
    # modes share the same output intensity scale
    scale = np.sqrt(cfg.nx * cfg.ny * cfg.nz)
    volumes = np.empty((phases, cfg.nx, cfg.ny, cfg.nz), dtype=np.float32)
    iteration_log = []
    nonconvergent = []
    for p in range(phases):
        mask = masks[p][None, :, :]  # broadcast over kx
        coil_imgs = np.empty((n_coils, cfg.nx, cfg.ny, cfg.nz), dtype=np.complex128)
        if params.mode == MODE_ZERO_FILLED:
            for c in range(n_coils):
                coil_imgs[c] = ifftc(kgrids[p, c])
        else:
            for c in range(n_coils):
                log = []
                coil_imgs[c] = _ista(kgrids[p, c] / scale, mask, params, log)
                iteration_log.append({"phase": p, "coil": c, "objective": log})
                worst = max((log[k + 1] - log[k]) / max(abs(log[k]), 1e-30)
                            for k in range(len(log) - 1))
                if worst > 1e-6:
                    nonconvergent.append({"phase": p, "coil": c, "relative_increase": worst})
        volumes[p] = np.sqrt((np.abs(coil_imgs) ** 2).sum(axis=0))
    meta = {
        "mode": params.mode,
        "lambda_rel": params.lambda_rel,
        "iterations": params.iterations,
        "wavelet": f"{params.wavelet_name}/{params.wavelet_levels}",
        "selected_state": list(bins.selected_state) if isinstance(bins.selected_state, tuple)
        else bins.selected_state,
        "fraction_selected": bins.fraction_selected,
        "nonconvergent": nonconvergent,
        "iteration_log": iteration_log,
    }
    return VolumeSeries(volumes=volumes, mode=params.mode, meta=meta)
