"""Respiration motion extraction from navigator images.

2-D mode follows the four-step template-matching pipeline: the first
navigator is the reference; rectangular ROIs on it are matched against every
later navigator by exhaustive integer-shift Pearson correlation inside a
square search window; a per-ROI PCA picks the dominant shift direction and
each image axis is served by the ROI whose dominant direction aligns best
with it, contributing its raw integer shift along that axis.

Shift vectors are (dx, dy) in image-frame terms: dx along columns (the AP
axis of the navigator), dy along rows (SI).

1-D mode is the baseline: magnitude profiles of the ky = kz = 0 line per
coil, concatenated, reduced to the first principal-component score per
navigator. It sees motion along the readout (SI) projection only.
"""

from dataclasses import dataclass, asdict

import numpy as np

from .errors import ConfigError, DegenerateMotion, DegeneratePatch, MissingNavData
from .sampling import ROLE_NAVIGATION

# the in-vivo operating point used a +-25 px window on larger navigators;
# desk-scale defaults use a smaller window that fits 64 px images
PAPER_SEARCH_RADIUS = 25


@dataclass(frozen=True)
class Roi:
    origin: tuple  # (row, col) on the reference image
    size: tuple  # (rows, cols)
    expected_axis: str = "none"  # optional hint, not used by the algorithm


@dataclass(frozen=True)
class MotionConfig:
    rois: tuple
    search_radius_px: int = 6

    def validate(self, image_shape):
        if len(self.rois) < 1:
            raise ConfigError("need at least one ROI")
        if self.search_radius_px < 1:
            raise ConfigError("search_radius_px must be >= 1")
        h, w = image_shape
        r = self.search_radius_px
        for roi in self.rois:
            r0, c0 = roi.origin
            rh, rw = roi.size
            if rh < 2 or rw < 2:
                raise ConfigError("ROI too small")
            if r0 - r < 0 or c0 - r < 0 or r0 + rh + r > h or c0 + rw + r > w:
                raise ConfigError(f"ROI {roi.origin}+{roi.size} with window {r} leaves image bounds")
        return self

    def to_json_dict(self):
        return {"search_radius_px": self.search_radius_px,
                "rois": [asdict(r) for r in self.rois]}

    @classmethod
    def from_json_dict(cls, doc):
        rois = tuple(Roi(tuple(r["origin"]), tuple(r["size"]), r.get("expected_axis", "none"))
                     for r in doc["rois"])
        return cls(rois=rois, search_radius_px=doc.get("search_radius_px", 6))


@dataclass
class MotionTrace:
    mode: str  # "2d" or "1d"
    m_comb: np.ndarray = None  # (I, 2) integer (dx, dy); row 0 is (0, 0)
    raw_shifts: np.ndarray = None  # (I, R, 2); row 0 unused (reference)
    cc_peaks: np.ndarray = None  # (I, R); row 0 unused
    pca: dict = None  # per ROI: component, explained ratio; axis assignment
    scores: np.ndarray = None  # 1-D mode: (I,) surrogate scores

    def __len__(self):
        return len(self.m_comb) if self.mode == "2d" else len(self.scores)

    def to_json_dict(self):
        doc = {"mode": self.mode}
        if self.mode == "2d":
            doc["m_comb"] = self.m_comb.tolist()
            doc["raw_shifts"] = self.raw_shifts.tolist()
            doc["cc_peaks"] = self.cc_peaks.tolist()
            doc["pca"] = self.pca
        else:
            doc["scores"] = self.scores.tolist()
        return doc

    @classmethod
    def from_json_dict(cls, doc):
        if doc["mode"] == "2d":
            return cls(mode="2d",
                       m_comb=np.asarray(doc["m_comb"], dtype=int),
                       raw_shifts=np.asarray(doc["raw_shifts"], dtype=int),
                       cc_peaks=np.asarray(doc["cc_peaks"], dtype=float),
                       pca=doc["pca"])
        return cls(mode="1d", scores=np.asarray(doc["scores"], dtype=float))


def match_roi(reference_roi, target, origin, radius):
    """Best integer offset of a reference patch inside a target image.

    Evaluates the Pearson correlation coefficient at every offset (dx, dy)
    with |dx|, |dy| <= radius and returns ((dx, dy), peak_cc). Offsets where
    the target patch is constant are skipped; ties are broken by smaller
    L2 shift magnitude, then lexicographic (dx, dy).
    """
    ref = np.asarray(reference_roi, dtype=float)
    h, w = ref.shape
    r0, c0 = origin
    if r0 - radius < 0 or c0 - radius < 0 or r0 + h + radius > target.shape[0] \
            or c0 + w + radius > target.shape[1]:
        raise ConfigError("search window leaves target bounds")
    ref_c = ref - ref.mean()
    ref_norm = np.sqrt((ref_c**2).sum())
    if ref_norm == 0:
        raise DegeneratePatch("reference patch has zero variance")

    win = np.lib.stride_tricks.sliding_window_view(np.asarray(target, dtype=float), (h, w))
    cand = win[r0 - radius: r0 + radius + 1, c0 - radius: c0 + radius + 1]
    cand_c = cand - cand.mean(axis=(-2, -1), keepdims=True)
    cand_norm = np.sqrt((cand_c**2).sum(axis=(-2, -1)))
    num = np.einsum("ijkl,kl->ij", cand_c, ref_c)
    valid = cand_norm > 0
    if not valid.any():
        raise DegeneratePatch("all candidate patches have zero variance")
    cc = np.full(cand_norm.shape, -np.inf)
    cc[valid] = num[valid] / (cand_norm[valid] * ref_norm)

    best = cc.max()
    ties = np.argwhere(cc == best)
    offs = ties - radius  # rows: (dy, dx)
    order = np.lexsort((offs[:, 0], offs[:, 1], (offs**2).sum(axis=1)))
    dy, dx = offs[order[0]]
    return (int(dx), int(dy)), float(best)


def _pca_first_component(vectors):
    """Leading principal component of row vectors: (unit component, explained ratio).

    Sign convention: the component's largest-magnitude entry is positive.
    """
    centered = vectors - vectors.mean(axis=0)
    cov = centered.T @ centered
    evals, evecs = np.linalg.eigh(cov)
    total = evals.sum()
    if total <= 0:
        return None, 0.0
    comp = evecs[:, -1]
    if comp[np.argmax(np.abs(comp))] < 0:
        comp = -comp
    return comp, float(evals[-1] / total)


def extract_motion_2d(navs, config):
    """Template-matching motion trace over a navigator series."""
    n_imgs = len(navs)
    if n_imgs < 2:
        raise ConfigError("need at least two navigator images")
    config.validate(navs.images.shape[1:])
    n_rois = len(config.rois)
    reference = navs.images[0]

    raw = np.zeros((n_imgs, n_rois, 2), dtype=int)
    cc = np.zeros((n_imgs, n_rois))
    cc[0, :] = 1.0
    for r, roi in enumerate(config.rois):
        r0, c0 = roi.origin
        h, w = roi.size
        patch = reference[r0:r0 + h, c0:c0 + w]
        for i in range(1, n_imgs):
            (dx, dy), peak = match_roi(patch, navs.images[i], roi.origin,
                                       config.search_radius_px)
            raw[i, r] = (dx, dy)
            cc[i, r] = peak

    pca_info = {"rois": [], "axis_roi": {}}
    components = []
    for r in range(n_rois):
        comp, ratio = _pca_first_component(raw[1:, r].astype(float))
        components.append((comp, ratio))
        pca_info["rois"].append({
            "component": None if comp is None else comp.tolist(),
            "explained_ratio": ratio,
        })

    m_comb = np.zeros((n_imgs, 2), dtype=int)
    for axis, name in ((0, "x"), (1, "y")):
        scores = [(ratio * abs(comp[axis]), r)
                  for r, (comp, ratio) in enumerate(components) if comp is not None]
        if not scores:
            raise DegenerateMotion(f"no ROI with non-degenerate motion for axis {name}")
        r_max = max(scores)[1]
        pca_info["axis_roi"][name] = r_max
        m_comb[1:, axis] = raw[1:, r_max, axis]

    return MotionTrace(mode="2d", m_comb=m_comb, raw_shifts=raw, cc_peaks=cc, pca=pca_info)


def extract_motion_1d(raw):
    """Baseline 1-D respiratory surrogate from central k-space lines.

    Per navigator: the ky = kz = 0 line of each coil, 1-D inverse FT,
    magnitude, coils concatenated; the first PCA score across navigators is
    the surrogate. All-identical profiles yield an all-zero score trace.
    """
    schedule = raw.schedule
    if schedule.nav_count() == 0:
        raise MissingNavData("dataset contains no navigation events")
    feats = []
    for ev in schedule.nav_events:
        line_idx = None
        for i in schedule.readout_indices_of_event(ev.nav_id):
            ro = schedule.readouts[i]
            if ro.role == ROLE_NAVIGATION and ro.ky == 0 and ro.kz == 0:
                line_idx = i
                break
        if line_idx is None:
            raise MissingNavData(f"navigation event {ev.nav_id} lacks the ky=0, kz=0 line")
        lines = raw.samples[line_idx]  # (coils, nx)
        profiles = np.abs(np.fft.fftshift(
            np.fft.ifft(np.fft.ifftshift(lines, axes=-1), axis=-1), axes=-1))
        feats.append(profiles.ravel())
    feats = np.asarray(feats)
    centered = feats - feats.mean(axis=0)
    if not np.any(centered):
        return MotionTrace(mode="1d", scores=np.zeros(len(feats)))
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    loading = vt[0]
    sign = 1.0 if loading[np.argmax(np.abs(loading))] >= 0 else -1.0
    return MotionTrace(mode="1d", scores=sign * u[:, 0] * s[0])
