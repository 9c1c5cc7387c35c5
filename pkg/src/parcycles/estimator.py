"""scikit-learn style wrapper around :func:`enumerate_cycles`."""

from __future__ import annotations

from collections import Counter

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .api import ALGORITHMS, PARALLEL, check_combination, enumerate_cycles
from .pruning import Constraints, bundle_expand
from .sequential import RTOptions
from .validation import check_choice, check_edges, graph_from_array, pad_timestamps


class CycleEnumerator(TransformerMixin, BaseEstimator):
    """Enumerate simple, temporal or hop-limited cycles of an edge list.

    ``fit`` takes an ``(m, 2)`` or ``(m, 3)`` integer array of
    ``src, dst[, ts]`` rows. ``transform`` returns, for each row of its
    input, the number of fitted cycles that use that exact edge, which is
    handy as a per-transaction feature.

    Attributes set by ``fit``: ``graph_``, ``bundles_``, ``n_cycles_``,
    ``histogram_`` and ``metrics_``.
    """

    def __init__(
        self,
        mode: str = "simple",
        hops: int | None = None,
        window: int | None = None,
        algo: str = "johnson",
        parallel: str = "seq",
        threads: int = 1,
        grain: str = "edge",
        cos: str = "recursive",
        prune: str = "none",
        strict: bool = True,
        bundles: bool = True,
        trim: bool = False,
        seed: int | None = 0,
    ):
        self.mode = mode
        self.hops = hops
        self.window = window
        self.algo = algo
        self.parallel = parallel
        self.threads = threads
        self.grain = grain
        self.cos = cos
        self.prune = prune
        self.strict = strict
        self.bundles = bundles
        self.trim = trim
        self.seed = seed

    def _constraints(self) -> Constraints:
        check_choice("algo", self.algo, ALGORITHMS)
        check_choice("parallel", self.parallel, PARALLEL)
        check_choice("grain", self.grain, ("vertex", "edge"))
        check_choice("cos", self.cos, ("recursive", "complete"))
        if not isinstance(self.threads, (int, np.integer)) or self.threads < 1:
            raise ValueError(f"threads must be a positive integer, got {self.threads!r}")
        cons = Constraints(self.mode, self.window, self.hops, self.prune, self.strict)
        check_combination(cons, self.algo, self.parallel)
        return cons

    def fit(self, X, y=None):
        cons = self._constraints()
        arr = check_edges(X, pad=False)
        self.n_features_in_ = arr.shape[1]
        self.graph_ = graph_from_array(pad_timestamps(arr))
        res = enumerate_cycles(
            self.graph_,
            cons,
            algo=self.algo,
            parallel=self.parallel,
            threads=int(self.threads),
            grain=self.grain,
            cos=self.cos,
            bundles=self.bundles,
            opts=RTOptions(),
            trim=self.trim,
            seed=self.seed,
        )
        self.constraints_ = cons
        self.bundles_ = res.bundles
        self.n_cycles_ = res.count
        self.histogram_ = res.histogram()
        self.metrics_ = res.metrics
        return self

    def edge_participation(self) -> Counter:
        """Cycles per ``(src, dst, ts)`` edge, in original vertex ids."""
        check_is_fitted(self, "bundles_")
        ids = self.graph_.id_map
        cons = self.constraints_
        out: Counter = Counter()
        for b in self.bundles_:
            seq = b.vertex_seq
            k = len(seq)
            for ts in bundle_expand(b, cons.mode, cons.strict):
                for i in range(k):
                    out[(ids[seq[i]], ids[seq[(i + 1) % k]], ts[i])] += 1
        return out

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "bundles_")
        arr = check_edges(X, self.n_features_in_)
        part = self.edge_participation()
        return np.array([[part.get((int(s), int(d), int(t)), 0)] for s, d, t in arr], dtype=np.int64).reshape(-1, 1)

    def get_feature_names_out(self, input_features=None):
        return np.array(["cycle_count"], dtype=object)
