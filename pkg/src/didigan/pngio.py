"""16-bit grayscale PNG round trip for images in [-1, 1]."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

_SCALE = 65535.0


def save_image16(path: str | Path, img: np.ndarray) -> None:
    """Quantize [-1, 1] to uint16 and write a grayscale PNG."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"expected a 2D image, got shape {img.shape}")
    q = np.clip((img + 1.0) / 2.0, 0.0, 1.0)
    data = np.round(q * _SCALE).astype(np.uint16)
    Image.fromarray(data).save(Path(path))


def load_image16(path: str | Path) -> np.ndarray:
    """Read a 16-bit grayscale PNG back to [-1, 1] float64."""
    with Image.open(Path(path)) as im:
        data = np.asarray(im)
    if data.ndim != 2:
        raise ValueError(f"{path}: expected single-channel PNG, got shape {data.shape}")
    return data.astype(np.float64) / _SCALE * 2.0 - 1.0


def save_mask(path: str | Path, mask: np.ndarray) -> None:
    Image.fromarray(np.asarray(mask, dtype=bool).astype(np.uint8) * 255).save(Path(path))


def load_mask(path: str | Path) -> np.ndarray:
    with Image.open(Path(path)) as im:
        return np.asarray(im) > 127


def save_labels(path: str | Path, labels: np.ndarray) -> None:
    Image.fromarray(np.asarray(labels, dtype=np.uint8)).save(Path(path))


def load_labels(path: str | Path) -> np.ndarray:
    with Image.open(Path(path)) as im:
        return np.asarray(im).astype(np.uint8)
