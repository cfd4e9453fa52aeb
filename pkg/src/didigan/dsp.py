"""Anti-aliased filtering and resampling primitives.

Every resolution change and pointwise nonlinearity in the synthesis stack is
routed through here so that feature maps are treated as discrete samples of a
bandlimited continuous signal: low-pass before decimation, suppress images
after zero-insertion, and oversample around nonlinearities. A deliberately
naive path (nearest-neighbour / strided) is provided for the ablation switch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np
import torch
import torch.nn.functional as F
from scipy import signal


@dataclass(frozen=True)
class LowpassKernel:
    """Odd-length symmetric FIR low-pass filter with unit DC gain.

    ``cutoff`` is the passband edge and ``cutoff + transition_width`` the
    stopband edge, both in cycles/sample of the domain the taps are applied
    in (for a resampler that is the zero-stuffed intermediate grid).
    """

    taps: np.ndarray
    cutoff: float
    transition_width: float

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=np.float64)
        object.__setattr__(self, "taps", taps)
        if taps.ndim != 1 or taps.size % 2 != 1:
            raise ValueError(f"kernel taps must be odd-length 1D, got shape {taps.shape}")
        if not np.all(np.isfinite(taps)):
            raise ValueError("kernel taps must be finite")
        if abs(taps.sum() - 1.0) > 1e-9:
            raise ValueError(f"kernel DC gain must be 1 within 1e-9, got {taps.sum()!r}")
        if not np.allclose(taps, taps[::-1], atol=1e-12):
            raise ValueError("kernel taps must be symmetric (linear phase)")
        if not 0.0 < self.cutoff <= 0.5:
            raise ValueError(f"cutoff must lie in (0, 0.5], got {self.cutoff}")
        if self.transition_width <= 0.0:
            raise ValueError(f"transition_width must be > 0, got {self.transition_width}")

    @property
    def half_length(self) -> int:
        return (self.taps.size - 1) // 2


def delta_kernel() -> LowpassKernel:
    """Single-tap identity kernel (no filtering)."""
    return LowpassKernel(np.array([1.0]), cutoff=0.5, transition_width=0.5)


def design_lowpass(cutoff: float, transition_width: float, attenuation_db: float) -> LowpassKernel:
    """Design a Kaiser-windowed sinc low-pass filter.

    The transition band spans [cutoff, cutoff + transition_width]; the
    returned kernel is guaranteed (by a measured dense-DFT sweep) to reach
    at least ``attenuation_db`` of stopband rejection, with unit DC gain.
    """
    if not cutoff > 0.0:
        raise ValueError(f"cutoff must be > 0, got {cutoff}")
    if not cutoff + transition_width <= 0.5 + 1e-12:
        raise ValueError(
            "cutoff + transition_width must be <= 0.5, got "
            f"{cutoff} + {transition_width} = {cutoff + transition_width}"
        )
    if not attenuation_db >= 20.0:
        raise ValueError(f"attenuation_db must be >= 20, got {attenuation_db}")

    # kaiserord's attenuation estimate runs slightly optimistic; grow the tap
    # count until the measured sweep actually clears the requested floor.
    numtaps, beta = signal.kaiserord(attenuation_db, transition_width / 0.5)
    numtaps |= 1
    band_center = cutoff + transition_width / 2.0
    for _ in range(64):
        taps = signal.firwin(numtaps, band_center, window=("kaiser", beta), fs=1.0)
        taps = taps / taps.sum()
        if _measured_stopband_db(taps, cutoff + transition_width) <= -attenuation_db - 0.2:
            return LowpassKernel(taps, cutoff=cutoff, transition_width=transition_width)
        numtaps += 2
    raise RuntimeError("low-pass design failed to meet the requested attenuation")


def resampling_kernel(
    up: int,
    down: int,
    attenuation_db: float = 60.0,
    transition_frac: float = 0.4,
) -> LowpassKernel:
    """Kernel suited to ``resample(img, up, down)``.

    The transition band straddles the tighter of the anti-imaging and
    anti-aliasing Nyquist limits of the zero-stuffed intermediate grid;
    ``transition_frac`` trades passband coverage against tap count.
    """
    if up < 1 or down < 1:
        raise ValueError("up and down must be positive integers")
    if up == down == 1:
        return delta_kernel()
    half_band = 0.5 * min(1.0 / up, 1.0 / down)
    cutoff = half_band * (1.0 - transition_frac)
    width = 2.0 * half_band * transition_frac
    return design_lowpass(cutoff, width, attenuation_db)


def _measured_stopband_db(taps: np.ndarray, stop_edge: float, n_freqs: int = 4096) -> float:
    if stop_edge >= 0.5:
        return -math.inf
    grid = np.linspace(stop_edge, 0.5, n_freqs)
    _, h = signal.freqz(taps, worN=grid, fs=1.0)
    return 20.0 * math.log10(max(np.abs(h).max(), 1e-300))


@dataclass
class ImageGrid:
    """Square 2D image with an attached sample rate (samples per unit length)."""

    data: np.ndarray
    sample_rate: float = 1.0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2 or self.data.shape[0] != self.data.shape[1]:
            raise ValueError(f"image must be square 2D, got shape {self.data.shape}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("image values must be finite")
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")


ImageLike = Union[ImageGrid, np.ndarray, torch.Tensor]


def reflect_pad_last(x: torch.Tensor, pad: int) -> torch.Tensor:
    """Reflect-pad the last axis, supporting pads larger than the axis."""
    if pad == 0:
        return x
    n = x.shape[-1]
    idx = torch.arange(-pad, n + pad, device=x.device)
    if n == 1:
        idx = torch.zeros_like(idx)
    else:
        period = 2 * n - 2
        idx = torch.remainder(idx, period)
        idx = torch.where(idx >= n, period - idx, idx)
    return x.index_select(-1, idx)


def _filter_last_axis(x: torch.Tensor, taps: torch.Tensor, up: int, down: int) -> torch.Tensor:
    """upfirdn along the last axis: zero-stuff, reflect-pad, filter, decimate."""
    lead = x.shape[:-1]
    n = x.shape[-1]
    y = x.reshape(-1, 1, n)
    if up > 1:
        stuffed = y.new_zeros((y.shape[0], 1, n * up))
        stuffed[..., ::up] = y * up
        y = stuffed
    half = (taps.shape[0] - 1) // 2
    if half > 0:
        y = reflect_pad_last(y, half)
    y = F.conv1d(y, taps.flip(0).reshape(1, 1, -1))
    if down > 1:
        y = y[..., ::down]
    return y.reshape(*lead, -1)


def _resample_tensor(x: torch.Tensor, up: int, down: int, taps_np: np.ndarray) -> torch.Tensor:
    taps = torch.as_tensor(taps_np, dtype=x.dtype, device=x.device)
    y = _filter_last_axis(x, taps, up, down)
    y = _filter_last_axis(y.transpose(-1, -2), taps, up, down).transpose(-1, -2)
    return y


def _naive_resample_tensor(x: torch.Tensor, up: int, down: int) -> torch.Tensor:
    if up > 1:
        x = x.repeat_interleave(up, dim=-1).repeat_interleave(up, dim=-2)
    if down > 1:
        x = x[..., ::down, ::down]
    return x


def _check_resample_args(side: int, up: int, down: int, kernel: LowpassKernel | None) -> None:
    if up < 1 or down < 1 or up != int(up) or down != int(down):
        raise ValueError(f"up/down must be positive integers, got up={up}, down={down}")
    if (side * up) % down != 0:
        raise ValueError(
            f"output side {side}*{up}/{down} is not an integer; side must divide"
        )
    if kernel is not None and down > up:
        limit = 0.5 * up / down
        if kernel.cutoff > limit + 1e-12:
            raise ValueError(
                f"kernel cutoff {kernel.cutoff} exceeds the decimation limit "
                f"0.5*up/down = {limit}"
            )


def resample(img: ImageLike, up: int, down: int, kernel: LowpassKernel) -> ImageLike:
    """Anti-aliased rational resampling by up/down along both axes.

    The kernel is applied on the zero-stuffed intermediate grid (rate
    ``up`` times the input rate); output side is ``side * up / down`` and
    must be integral. Edges are handled by reflection about the first and
    last samples; the output grid is anchored at input sample 0.
    """
    if isinstance(img, ImageGrid):
        out = resample(img.data, up, down, kernel)
        return ImageGrid(out, sample_rate=img.sample_rate * up / down)
    if isinstance(img, torch.Tensor):
        _check_resample_args(img.shape[-1], up, down, kernel)
        return _resample_tensor(img, up, down, kernel.taps)
    arr = np.asarray(img, dtype=np.float64)
    _check_resample_args(arr.shape[-1], up, down, kernel)
    return _resample_tensor(torch.from_numpy(arr), up, down, kernel.taps).numpy()


def naive_resample(img: ImageLike, up: int, down: int) -> ImageLike:
    """Nearest-neighbour upsampling / strided decimation (the aliased path)."""
    if isinstance(img, ImageGrid):
        out = naive_resample(img.data, up, down)
        return ImageGrid(out, sample_rate=img.sample_rate * up / down)
    if isinstance(img, torch.Tensor):
        _check_resample_args(img.shape[-1], up, down, None)
        return _naive_resample_tensor(img, up, down)
    arr = np.asarray(img, dtype=np.float64)
    _check_resample_args(arr.shape[-1], up, down, None)
    return _naive_resample_tensor(torch.from_numpy(arr), up, down).numpy()


def filtered_nonlinearity(
    img: ImageLike,
    fn: Callable,
    oversample: int = 2,
    attenuation_db: float = 60.0,
) -> ImageLike:
    """Apply a pointwise nonlinearity on an oversampled grid.

    Upsample by ``oversample``, apply ``fn``, low-pass at the original
    Nyquist rate and sample back down, so harmonics introduced by the
    nonlinearity cannot fold back into the representable band.
    """
    if oversample not in (2, 4):
        raise ValueError(f"oversample must be 2 or 4, got {oversample}")
    kernel = resampling_kernel(oversample, 1, attenuation_db=attenuation_db)
    if isinstance(img, ImageGrid):
        out = filtered_nonlinearity(img.data, fn, oversample, attenuation_db)
        return ImageGrid(out, sample_rate=img.sample_rate)
    if isinstance(img, torch.Tensor):
        hi = _resample_tensor(img, oversample, 1, kernel.taps)
        hi = fn(hi)
        taps = torch.as_tensor(kernel.taps, dtype=hi.dtype, device=hi.device)
        lo = _filter_last_axis(hi, taps, 1, oversample)
        lo = _filter_last_axis(lo.transpose(-1, -2), taps, 1, oversample).transpose(-1, -2)
        return lo
    arr = np.asarray(img, dtype=np.float64)
    hi = _resample_tensor(torch.from_numpy(arr), oversample, 1, kernel.taps).numpy()
    hi = np.asarray(fn(hi), dtype=np.float64)
    lo = _resample_tensor(torch.from_numpy(hi), 1, oversample, kernel.taps).numpy()
    return lo


def make_constraint(
    x: ImageLike,
    factor: int,
    attenuation_db: float = 60.0,
) -> ImageLike:
    """Anti-aliased downsample of an image into a low-resolution blueprint."""
    if factor < 1:
        raise ValueError(f"factor must be a positive integer, got {factor}")
    side = x.data.shape[-1] if isinstance(x, ImageGrid) else np.asarray(x).shape[-1] \
        if not isinstance(x, torch.Tensor) else x.shape[-1]
    if side % factor != 0:
        raise ValueError(f"image side {side} is not divisible by factor {factor}")
    if factor == 1:
        return x
    kernel = resampling_kernel(1, factor, attenuation_db=attenuation_db)
    return resample(x, 1, factor, kernel)
