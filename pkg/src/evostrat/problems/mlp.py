"""Fully connected tanh policy network on top of :mod:`evostrat.reshape`."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..reshape import TreeLayout, build_layout


@dataclass(frozen=True)
class MlpSpec:
    """Layer widths from input to output; every layer, the output included, uses tanh."""

    layer_sizes: tuple[int, ...]

    def __post_init__(self):
        if len(self.layer_sizes) < 2 or any(int(s) < 1 for s in self.layer_sizes):
            raise ValueError(f"need at least input and output sizes, got {self.layer_sizes}")

    @classmethod
    def build(cls, input_dim: int, output_dim: int, hidden=(32, 32, 32, 32)) -> "MlpSpec":
        return cls((int(input_dim), *(int(h) for h in hidden), int(output_dim)))

    @property
    def num_layers(self) -> int:
        return len(self.layer_sizes) - 1

    def layout(self) -> TreeLayout:
        entries = []
        for i, (n_in, n_out) in enumerate(zip(self.layer_sizes[:-1], self.layer_sizes[1:])):
            entries.append((f"layer_{i}/kernel", (n_in, n_out)))
            entries.append((f"layer_{i}/bias", (n_out,)))
        return build_layout(entries)

    @property
    def num_params(self) -> int:
        return self.layout().total_dims


def mlp_forward(params, obs, spec: MlpSpec) -> np.ndarray:
    """Single-network forward pass; ``obs`` has shape ``(input_dim,)``."""
    h = np.asarray(obs, dtype=np.float64)
    if h.shape != (spec.layer_sizes[0],):
        raise ValueError(f"observation shape {h.shape} != ({spec.layer_sizes[0]},)")
    for i in range(spec.num_layers):
        w, b = params[f"layer_{i}/kernel"], params[f"layer_{i}/bias"]
        if w.shape != (spec.layer_sizes[i], spec.layer_sizes[i + 1]):
            raise ValueError(f"layer_{i}/kernel has shape {w.shape}")
        h = np.tanh(h @ w + b)
    return h


def mlp_forward_batch(params, obs, spec: MlpSpec) -> np.ndarray:
    """One network per row: kernels ``(M, in, out)``, biases ``(M, out)``, ``obs`` ``(M, in)``."""
    h = np.asarray(obs, dtype=np.float64)
    for i in range(spec.num_layers):
        h = np.tanh(np.einsum("mi,mio->mo", h, params[f"layer_{i}/kernel"]) + params[f"layer_{i}/bias"])
    return h
