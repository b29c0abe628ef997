"""Map named parameter arrays to and from the flat vector strategies search over.

Entries keep their insertion order and are flattened row-major, so a
serialized layout fully determines the mapping.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class TreeLayout:
    names: tuple[str, ...]
    shapes: tuple[tuple[int, ...], ...]
    offsets: tuple[int, ...]
    total_dims: int

    def __len__(self):
        return len(self.names)

    def sizes(self) -> list[int]:
        return [int(np.prod(s, dtype=np.int64)) for s in self.shapes]

    def offset(self, name: str) -> int:
        return self.offsets[self.names.index(name)]

    def to_json(self) -> str:
        return json.dumps(
            [
                {"name": n, "shape": list(s), "offset": o}
                for n, s, o in zip(self.names, self.shapes, self.offsets)
            ]
        )

    @classmethod
    def from_json(cls, text: str) -> "TreeLayout":
        items = json.loads(text)
        layout = build_layout([(d["name"], tuple(d["shape"])) for d in items])
        if list(layout.offsets) != [d["offset"] for d in items]:
            raise ValueError("serialized offsets are not contiguous in entry order")
        return layout


def build_layout(entries: Sequence[tuple[str, Sequence[int] | int]]) -> TreeLayout:
    names, shapes, offsets = [], [], []
    total = 0
    for name, shape in entries:
        shape = (int(shape),) if np.isscalar(shape) else tuple(int(s) for s in shape)
        if name in names:
            raise ValueError(f"duplicate parameter name {name!r}")
        if any(s <= 0 for s in shape):
            raise ValueError(f"parameter {name!r} has a non-positive extent in shape {shape}")
        names.append(name)
        shapes.append(shape)
        offsets.append(total)
        total += int(np.prod(shape, dtype=np.int64))
    return TreeLayout(tuple(names), tuple(shapes), tuple(offsets), total)


def layout_of(tree: Mapping[str, np.ndarray]) -> TreeLayout:
    """Layout of an existing tree (scalars count as shape ``(1,)``)."""
    return build_layout([(k, np.shape(v) or (1,)) for k, v in tree.items()])


def flatten(tree: Mapping[str, np.ndarray], layout: TreeLayout) -> np.ndarray:
    if set(tree) != set(layout.names):
        raise ValueError(f"tree keys {sorted(tree)} do not match layout {list(layout.names)}")
    parts = []
    for name, shape in zip(layout.names, layout.shapes):
        arr = np.asarray(tree[name], dtype=np.float64)
        if arr.shape != shape and not (arr.shape == () and shape == (1,)):
            raise ValueError(f"{name!r} has shape {arr.shape}, layout expects {shape}")
        parts.append(arr.reshape(-1))
    return np.concatenate(parts) if parts else np.zeros(0)


def unflatten(flat, layout: TreeLayout) -> dict[str, np.ndarray]:
    flat = np.asarray(flat, dtype=np.float64)
    if flat.shape != (layout.total_dims,):
        raise ValueError(f"flat vector has shape {flat.shape}, layout needs ({layout.total_dims},)")
    return {
        name: flat[o : o + size].reshape(shape).copy()
        for name, shape, o, size in zip(layout.names, layout.shapes, layout.offsets, layout.sizes())
    }


def unflatten_batch(flat, layout: TreeLayout) -> dict[str, np.ndarray]:
    """Unflatten an ``(N, D)`` population into arrays of shape ``(N, *shape)``."""
    flat = np.asarray(flat, dtype=np.float64)
    if flat.ndim != 2 or flat.shape[1] != layout.total_dims:
        raise ValueError(f"population has shape {flat.shape}, layout needs (N, {layout.total_dims})")
    n = flat.shape[0]
    return {
        name: flat[:, o : o + size].reshape((n,) + shape)
        for name, shape, o, size in zip(layout.names, layout.shapes, layout.offsets, layout.sizes())
    }
