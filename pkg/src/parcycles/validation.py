"""Input validation for array-shaped edge lists."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .graph import TemporalGraph


def check_edges(X, n_features: int | None = None, pad: bool = True) -> np.ndarray:
    """Return ``X`` as an ``(m, 3)`` int64 array of ``src, dst, ts`` rows.

    Two-column input gets timestamp 0. Non-integral values are rejected, as
    is a column count other than ``n_features`` when that is given. With
    ``pad=False`` two-column input is returned as is.
    """
    arr = check_array(X, dtype=None, ensure_2d=True, ensure_min_samples=0, ensure_all_finite=True)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ValueError(f"edge array must have 2 or 3 columns, got shape {arr.shape}")
    if n_features is not None and arr.shape[1] != n_features:
        raise ValueError(f"X has {arr.shape[1]} features, but the estimator was fitted with {n_features}")
    if arr.dtype.kind == "f":
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("edge array must hold integers")
    elif arr.dtype.kind not in "iu":
        raise ValueError(f"edge array must hold integers, got dtype {arr.dtype}")
    arr = arr.astype(np.int64, copy=False)
    return pad_timestamps(arr) if pad else arr


def pad_timestamps(arr: np.ndarray) -> np.ndarray:
    """Append a zero timestamp column to two-column edge arrays."""
    if arr.shape[1] == 2:
        arr = np.column_stack([arr, np.zeros(len(arr), dtype=np.int64)])
    return arr


def graph_from_array(arr: np.ndarray) -> TemporalGraph:
    """Graph with dense ids in sorted order of the original ids; self-loops dropped."""
    if len(arr) == 0:
        return TemporalGraph(0, [])
    ids, inv = np.unique(arr[:, :2], return_inverse=True)
    inv = inv.reshape(-1, 2)
    keep = inv[:, 0] != inv[:, 1]
    edges = zip(inv[keep, 0].tolist(), inv[keep, 1].tolist(), arr[keep, 2].tolist())
    return TemporalGraph(len(ids), edges, id_map=ids.tolist(), dropped_self_loops=int((~keep).sum()))


def check_choice(name: str, value, choices) -> None:
    if value not in choices:
        raise ValueError(f"{name} must be one of {tuple(choices)}, got {value!r}")
