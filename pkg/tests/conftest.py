"""Shared test oracles: brute-force DFT sweeps, bandlimited fields, Fourier shifts."""

import numpy as np
import pytest


def brute_dft_mag(taps: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """|H(f)| from the definition, independent of scipy's freqz."""
    k = np.arange(len(taps))
    ph = np.exp(-2j * np.pi * np.outer(freqs, k))
    return np.abs(ph @ taps)


def bandlimited_image(rng: np.random.Generator, n: int, max_freq: float) -> np.ndarray:
    """Random periodic field with spectral support inside |f| <= max_freq (cycles/sample)."""
    spec = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    fy = np.fft.fftfreq(n)[:, None]
    fx = np.fft.fftfreq(n)[None, :]
    spec[np.hypot(fy, fx) > max_freq] = 0.0
    img = np.fft.ifft2(spec).real
    return img / img.std()


def fourier_shift(img: np.ndarray, dy: float, dx: float) -> np.ndarray:
    """Subpixel translation via a phase ramp (periodic; compare interiors only)."""
    n0, n1 = img.shape
    fy = np.fft.fftfreq(n0)[:, None]
    fx = np.fft.fftfreq(n1)[None, :]
    ramp = np.exp(-2j * np.pi * (fy * dy + fx * dx))
    return np.fft.ifft2(np.fft.fft2(img) * ramp).real


def interior(img: np.ndarray, margin: int) -> np.ndarray:
    return img[margin:-margin, margin:-margin]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
