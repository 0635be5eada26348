"""Centered FFT wrappers.

Convention used everywhere in the package: the DC sample sits at array index
n//2 on every transformed axis, so a k-space coordinate k maps to array index
k + n//2. Forward transforms are unnormalized, inverse transforms carry the
1/N factor; the `_ortho` pair is unitary (used by the iterative recon so the
masked-FT operator has unit spectral norm).
"""

import numpy as np


def fftc(x, axes=None):
    """Centered unnormalized forward FFT."""
    return np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(x, axes=axes), axes=axes), axes=axes)


def ifftc(x, axes=None):
    """Centered inverse FFT with 1/N normalization."""
    return np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(x, axes=axes), axes=axes), axes=axes)


def fftc_ortho(x, axes=None):
    return np.fft.fftshift(
        np.fft.fftn(np.fft.ifftshift(x, axes=axes), axes=axes, norm="ortho"), axes=axes
    )


def ifftc_ortho(x, axes=None):
    return np.fft.fftshift(
        np.fft.ifftn(np.fft.ifftshift(x, axes=axes), axes=axes, norm="ortho"), axes=axes
    )
