"""Periodized orthogonal Daubechies wavelet transforms.

Implements the multilevel separable DWT used by the iterative reconstruction
(db4, 3 levels by default) and the single-level 2-D decomposition behind the
wavelet noise estimator (db8). Filters are the standard orthonormal Daubechies
families named by vanishing moments (db4 = 8 taps, db8 = 16 taps).

Coefficients are stored in the in-place corner layout: after transforming an
axis, the first half of the axis holds the approximation and the second half
the detail; each level recurses on the approximation corner. An axis is only
transformed while its current length is even and at least one filter long, so
anisotropic grids (e.g. a short slice axis) simply stop early on that axis.
With periodization and orthonormal filters every level is unitary, which the
soft-thresholding recon relies on.
"""

import numpy as np

# Orthonormal scaling (lowpass synthesis) filters, sum = sqrt(2).
_SCALING = {
    "db4": np.array([
        0.23037781330885523, 0.7148465705525415, 0.6308807679295904,
        -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
        0.032883011666982945, -0.010597401784997278,
    ]),
    "db8": np.array([
        0.05441584224308161, 0.3128715909144659, 0.6756307362980128,
        0.5853546836548691, -0.015829105256023893, -0.2840155429624281,
        0.00047248457399797254, 0.128747426620186, -0.01736930100202211,
        -0.04408825393106472, 0.013981027917015516, 0.008746094047015655,
        -0.00487035299301066, -0.0003917403729959771, 0.0006754494059985568,
        -0.00011747678400228192,
    ]),
}


def filters(name):
    """Analysis (dec_lo, dec_hi) pair for a wavelet name."""
    h = _SCALING[name]
    dec_lo = h[::-1].copy()
    # quadrature mirror: g[k] = (-1)^k h[L-1-k]
    dec_hi = h * ((-1.0) ** np.arange(len(h)))
    return dec_lo, dec_hi


def _gather_index(n, taps):
    # rows: output sample, cols: filter tap, wrapped periodically
    return (2 * np.arange(n // 2)[:, None] + np.arange(taps)[None, :]) % n


def dwt_axis(x, name, axis):
    """One periodized decomposition level along `axis`.

    Returns an array of the same shape: approximation in the first half of the
    axis, detail in the second half.
    """
    dec_lo, dec_hi = filters(name)
    x = np.moveaxis(np.asarray(x), axis, -1)
    n = x.shape[-1]
    windows = x[..., _gather_index(n, dec_lo.size)]  # (..., n/2, taps)
    out = np.concatenate([windows @ dec_lo, windows @ dec_hi], axis=-1)
    return np.moveaxis(out, -1, axis)


def idwt_axis(x, name, axis):
    """Inverse of :func:`dwt_axis` (exact adjoint of the unitary analysis)."""
    dec_lo, dec_hi = filters(name)
    x = np.moveaxis(np.asarray(x), axis, -1)
    n = x.shape[-1]
    idx = _gather_index(n, dec_lo.size)
    lo = x[..., : n // 2]
    hi = x[..., n // 2:]
    out = np.zeros_like(x)
    # Scatter-add tap by tap; for fixed tap k the target columns (2n+k) mod N
    # are all distinct (stride 2, N even), so fancy-index add is safe.
    for k in range(dec_lo.size):
        out[..., idx[:, k]] += lo * dec_lo[k] + hi * dec_hi[k]
    return np.moveaxis(out, -1, axis)


def transform_plan(shape, name="db4", levels=3):
    """Per-level list of transformable axes for `decompose`/`reconstruct`."""
    taps = _SCALING[name].size
    sizes = list(shape)
    plan = []
    for _ in range(levels):
        axes = [a for a, n in enumerate(sizes) if n % 2 == 0 and n >= taps]
        if not axes:
            break
        plan.append(axes)
        for a in axes:
            sizes[a] //= 2
    return plan


def decompose(x, name="db4", levels=3):
    """Multilevel separable periodized DWT (corner layout), unitary."""
    coeffs = np.array(x, dtype=np.result_type(x, np.float64), copy=True)
    region = [slice(0, n) for n in coeffs.shape]
    for axes in transform_plan(coeffs.shape, name, levels):
        sub = coeffs[tuple(region)]
        for a in axes:
            sub[...] = dwt_axis(sub, name, a)
        for a in axes:
            region[a] = slice(0, region[a].stop // 2)
    return coeffs


def reconstruct(coeffs, name="db4", levels=3):
    """Inverse of :func:`decompose`."""
    out = np.array(coeffs, dtype=np.result_type(coeffs, np.float64), copy=True)
    plan = transform_plan(out.shape, name, levels)
    # recompute the per-level approximation-corner extents
    sizes = list(out.shape)
    extents = []
    for axes in plan:
        extents.append(list(sizes))
        for a in axes:
            sizes[a] //= 2
    for axes, ext in zip(reversed(plan), reversed(extents)):
        sub = out[tuple(slice(0, n) for n in ext)]
        for a in reversed(axes):
            sub[...] = idwt_axis(sub, name, a)
    return out


def dwt2_single(image, name="db8"):
    """Single-level 2-D decomposition, returns (LL, LH, HL, HH).

    HH is the diagonal detail band (highpass along both axes).
    """
    t = dwt_axis(np.asarray(image, dtype=float), name, 0)
    t = dwt_axis(t, name, 1)
    h0, h1 = t.shape[0] // 2, t.shape[1] // 2
    return t[:h0, :h1], t[:h0, h1:], t[h0:, :h1], t[h0:, h1:]


def soft_threshold(coeffs, tau):
    """Complex-aware soft thresholding by magnitude."""
    mag = np.abs(coeffs)
    shrunk = np.maximum(mag - tau, 0.0)
    safe = np.where(mag > 0, mag, 1.0)
    return coeffs * (shrunk / safe)
