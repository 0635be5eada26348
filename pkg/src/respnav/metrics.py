"""Image-quality metrics and statistical comparison of reconstructions.

Per 2-D slice: histogram entropy (256 bins over the slice's own intensity
range), anisotropic total variation (sum of absolute forward differences) and
a robust wavelet noise estimate (median absolute diagonal detail coefficient
of a single-level db8 decomposition divided by 0.6745). Method-level
aggregates are mean, std and a 95 % normal-approximation confidence interval
over all (slice, phase) samples; methods are compared with paired two-sided
Student's t-tests on the matched samples.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import InsufficientSamples, TooSmall
from . import wavelet

METRIC_NAMES = ("entropy", "tv", "sigma_noise")
ENTROPY_BINS = 256


def histogram_entropy(image):
    """Shannon entropy in bits of the 256-bin histogram of a slice.

    The slice is normalized to [0, 1] by its own min/max; a constant slice
    has zero entropy by convention.
    """
    img = np.asarray(image, dtype=float)
    lo, hi = img.min(), img.max()
    if hi == lo:
        return 0.0
    counts, _ = np.histogram((img - lo) / (hi - lo), bins=ENTROPY_BINS, range=(0.0, 1.0))
    p = counts[counts > 0] / img.size
    return float(-(p * np.log2(p)).sum())


def total_variation(image):
    """Anisotropic TV: sum of |forward differences|, no wraparound."""
    img = np.asarray(image, dtype=float)
    return float(np.abs(np.diff(img, axis=0)).sum() + np.abs(np.diff(img, axis=1)).sum())


def sigma_noise(image):
    """Robust Gaussian noise std from the finest diagonal wavelet band."""
    img = np.asarray(image, dtype=float)
    if img.shape[0] < 16 or img.shape[1] < 16:
        raise TooSmall("sigma_noise needs a slice of at least 16x16")
    _, _, _, hh = wavelet.dwt2_single(img, "db8")
    return float(np.median(np.abs(hh)) / 0.6745)


def slice_metrics(volumes):
    """Per (slice, phase) metric table for a (P, nx, ny, nz) volume series.

    Slices are taken along the last axis. Returns a dict of metric name ->
    (nz, P) arrays.
    """
    phases, _, _, nz = volumes.shape
    out = {m: np.empty((nz, phases)) for m in METRIC_NAMES}
    for p in range(phases):
        for z in range(nz):
            sl = volumes[p, :, :, z]
            out["entropy"][z, p] = histogram_entropy(sl)
            out["tv"][z, p] = total_variation(sl)
            out["sigma_noise"][z, p] = sigma_noise(sl)
    return out


def aggregate(samples):
    """mean / std / 95 % CI for a flat sample array."""
    v = np.asarray(samples, dtype=float).ravel()
    n = v.size
    mu = float(v.mean())
    sd = float(v.std(ddof=1)) if n > 1 else 0.0
    half = 1.96 * sd / np.sqrt(n) if n > 0 else 0.0
    return {"mean": mu, "std": sd, "ci95": [mu - half, mu + half], "n": int(n)}


def paired_t_test(a, b):
    """Two-sided paired Student's t-test on matched samples.

    Returns (t, p, degenerate): a zero-variance nonzero difference drives p
    to 0 and is flagged; identical samples give t = 0, p = 1.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise InsufficientSamples("paired test needs matched sample arrays")
    n = a.size
    if n < 3:
        raise InsufficientSamples(f"paired test needs n >= 3, got {n}")
    d = a - b
    mean = d.mean()
    sd = d.std(ddof=1)
    if sd == 0:
        if mean == 0:
            return 0.0, 1.0, False
        return float(np.sign(mean) * np.inf), 0.0, True
    t = mean / (sd / np.sqrt(n))
    p = 2.0 * (1.0 - stats.t.cdf(abs(t), n - 1))
    return float(t), float(p), False


@dataclass
class MetricsReport:
    methods: dict = field(default_factory=dict)  # name -> {"per_slice": {...}, "aggregates": {...}}
    comparisons: list = field(default_factory=list)

    def add_method(self, name, volumes):
        table = slice_metrics(volumes)
        self.methods[name] = {
            "per_slice": {m: table[m].tolist() for m in METRIC_NAMES},
            "aggregates": {m: aggregate(table[m]) for m in METRIC_NAMES},
        }

    def compare(self, name_a, name_b):
        """Paired t-tests per metric between two recorded methods."""
        res = {"a": name_a, "b": name_b, "metrics": {}}
        for m in METRIC_NAMES:
            a = np.asarray(self.methods[name_a]["per_slice"][m])
            b = np.asarray(self.methods[name_b]["per_slice"][m])
            t, p, degenerate = paired_t_test(a, b)
            res["metrics"][m] = {"t": t, "p": p, "degenerate": degenerate,
                                 "mean_diff": float((a - b).mean())}
        self.comparisons.append(res)
        return res

    def to_json_dict(self):
        return {"methods": self.methods, "comparisons": self.comparisons}

    @classmethod
    def from_json_dict(cls, doc):
        return cls(methods=doc["methods"], comparisons=doc.get("comparisons", []))
