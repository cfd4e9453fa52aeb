"""Disease-manifold mapping: class label + noise -> 512-d style code."""

from __future__ import annotations

import json
import math
from enum import Enum
from pathlib import Path

import numpy as np
import torch
from torch import nn

STYLE_DIM = 512


class ClassLabel(Enum):
    """Generator-side disease classes. The adversarial FAKE target lives in the critic."""

    AD = 0
    CN = 1


class EqualLinear(nn.Module):
    """Fully connected layer with equalized learning rate scaling."""

    def __init__(self, in_dim: int, out_dim: int, bias_init: float = 0.0):
        super().__init__()
        self.weight = nn.Parameter(torch.randn(out_dim, in_dim))
        self.bias = nn.Parameter(torch.full((out_dim,), bias_init))
        self.scale = 1.0 / math.sqrt(in_dim)

    def forward(self, x):
        return torch.nn.functional.linear(x, self.weight * self.scale, self.bias)


class MappingNetwork(nn.Module):
    """Embed a class label, concatenate mapping noise, pass through three FC layers.

    Output is the style code w that modulates every synthesis convolution.
    """

    def __init__(self, style_dim: int = STYLE_DIM, lrelu_slope: float = 0.2):
        super().__init__()
        self.style_dim = style_dim
        self.lrelu_slope = lrelu_slope
        self.embedding = nn.Parameter(torch.randn(len(ClassLabel), style_dim))
        self.fc1 = EqualLinear(2 * style_dim, style_dim)
        self.fc2 = EqualLinear(style_dim, style_dim)
        self.fc3 = EqualLinear(style_dim, style_dim)

    def embed(self, labels: torch.Tensor) -> torch.Tensor:
        return self.embedding[labels]

    def forward(self, labels: torch.Tensor, z: torch.Tensor) -> torch.Tensor:
        h = torch.cat([self.embed(labels), z], dim=-1)
        h = torch.nn.functional.leaky_relu(self.fc1(h), self.lrelu_slope)
        h = torch.nn.functional.leaky_relu(self.fc2(h), self.lrelu_slope)
        return self.fc3(h)


MappingParams = MappingNetwork


def embed_class(label: ClassLabel, params: MappingNetwork) -> np.ndarray:
    """Return the label's embedding row."""
    with torch.no_grad():
        row = params.embed(torch.tensor([label.value]))[0]
    return row.detach().cpu().numpy().astype(np.float64)


def map_to_style(label: ClassLabel, z: np.ndarray, params: MappingNetwork) -> np.ndarray:
    """Deterministically map (label, noise) to a style code."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (params.style_dim,):
        raise ValueError(f"noise must have shape ({params.style_dim},), got {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("noise vector must be finite")
    dtype = params.embedding.dtype
    with torch.no_grad():
        w = params(
            torch.tensor([label.value]),
            torch.as_tensor(z, dtype=dtype).unsqueeze(0),
        )[0]
    return w.detach().cpu().numpy().astype(np.float64)


def sample_noise(n: int, seed: int, style_dim: int = STYLE_DIM) -> np.ndarray:
    """The i.i.d. standard-normal mapping noise used by sample_styles."""
    gen = torch.Generator().manual_seed(seed)
    return torch.randn(n, style_dim, generator=gen).numpy().astype(np.float64)


def sample_styles(
    label: ClassLabel, n: int, seed: int, params: MappingNetwork
) -> np.ndarray:
    """Draw n style codes for one class from seeded mapping noise, shape (n, 512)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    z = sample_noise(n, seed, params.style_dim)
    dtype = params.embedding.dtype
    with torch.no_grad():
        w = params(
            torch.full((n,), label.value, dtype=torch.long),
            torch.as_tensor(z, dtype=dtype),
        )
    return w.detach().cpu().numpy().astype(np.float64)


def export_styles(path: str | Path, codes: np.ndarray, label: ClassLabel, seed: int) -> Path:
    """Write codes as a flat float32 binary with a JSON sidecar; returns the sidecar path."""
    path = Path(path)
    codes = np.ascontiguousarray(codes, dtype="<f4")
    codes.tofile(path)
    sidecar = path.with_suffix(path.suffix + ".json")
    sidecar.write_text(
        json.dumps(
            {"n": int(codes.shape[0]), "dim": int(codes.shape[1]),
             "class": label.name, "seed": int(seed), "dtype": "<f4"}
        )
    )
    return sidecar


def load_styles(path: str | Path) -> tuple[np.ndarray, dict]:
    """Inverse of export_styles."""
    path = Path(path)
    meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    codes = np.fromfile(path, dtype=meta["dtype"]).reshape(meta["n"], meta["dim"])
    return codes.astype(np.float64), meta
