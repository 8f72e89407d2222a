"""Table-based generative baselines: an autoregressive model with context
length k, and a product-of-Bernoullis model that emits all bits at once.

Bits are generated from position 0 (least significant) up to n-1. The context
of position t is the previous min(t, k) bits read as an integer whose highest
bit is the most recent one (bit t-1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (EmptyRequestError, ExplicitDistribution, ParseError, Prng,
                   SampleSet, ValidationError, derive_seed)
from .metrics import csv_text, xeb

ENUMERATION_CAP = 20
DEFAULT_ALPHA = 0.5
SWEEP_SAMPLES = 200_000


def _offsets(n: int, k: int) -> np.ndarray:
    sizes = [1 << min(t, k) for t in range(n)]
    return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)


@dataclass(eq=False)
class ArTableModel:
    n: int
    k: int
    alpha: float
    p1: np.ndarray        # P(bit=1) per (position, context), 0.5 where unobserved
    observed: np.ndarray  # bool, same layout

    @property
    def offsets(self) -> np.ndarray:
        return _offsets(self.n, self.k)

    @property
    def parameter_count(self) -> int:
        return int(self.observed.sum())

    def entries(self):
        """(t, context bits with the most recent leftmost, p1) for every stored entry."""
        off = self.offsets
        for t in range(self.n):
            width = min(t, self.k)
            for ctx in np.nonzero(self.observed[off[t]:off[t + 1]])[0]:
                text = format(int(ctx), f"0{width}b") if width else ""
                yield t, text, float(self.p1[off[t] + ctx])


@dataclass(eq=False)
class ProductModel:
    n: int
    p: np.ndarray

    @property
    def parameter_count(self) -> int:
        return self.n


def _check_samples(samples: SampleSet) -> None:
    if len(samples) == 0:
        raise EmptyRequestError("cannot fit a model to an empty sample set")


def fit_ar(samples: SampleSet, k: int, alpha: float = DEFAULT_ALPHA) -> ArTableModel:
    """Smoothed maximum likelihood: (ones + alpha) / (total + 2 alpha) per context."""
    _check_samples(samples)
    n = samples.n
    if not 0 <= k <= n - 1:
        raise ValidationError(f"order k={k} outside [0, {n - 1}]")
    if alpha < 0:
        raise ValidationError("smoothing alpha must be nonnegative")
    off = _offsets(n, k)
    ones = np.zeros(off[-1], dtype=np.int64)
    totals = np.zeros(off[-1], dtype=np.int64)
    kernels.ar_counts(np.ascontiguousarray(samples.samples), n, k, off, ones, totals)
    observed = totals > 0
    p1 = np.full(off[-1], 0.5)
    p1[observed] = (ones[observed] + alpha) / (totals[observed] + 2 * alpha)
    return ArTableModel(n, k, float(alpha), p1, observed)


def fit_product(samples: SampleSet) -> ProductModel:
    _check_samples(samples)
    bits = (samples.samples[:, None] >> np.arange(samples.n)) & 1
    return ProductModel(samples.n, bits.mean(axis=0))


def model_sample(model, count: int, rng: Prng, source_tag: str = "model") -> SampleSet:
    if count < 1:
        raise EmptyRequestError("sample count must be at least 1")
    u = rng.random(count * model.n).reshape(count, model.n)
    if isinstance(model, ProductModel):
        bits = (u < model.p[None, :]).astype(np.int64)
        out = (bits << np.arange(model.n)).sum(axis=1)
    else:
        out = np.empty(count, dtype=np.int64)
        kernels.ar_generate(model.p1, model.offsets, model.n, model.k, u, out)
    return SampleSet(model.n, out, source_tag=source_tag, seed=rng.seed)


def model_distribution(model) -> ExplicitDistribution:
    """Exact model probabilities for all 2^n strings (n <= 20)."""
    n = model.n
    if n > ENUMERATION_CAP:
        raise ValidationError(f"model_distribution is limited to n <= {ENUMERATION_CAP}")
    idx = np.arange(1 << n, dtype=np.int64)
    prob = np.ones(1 << n)
    for t in range(n):
        bit = (idx >> t) & 1
        if isinstance(model, ProductModel):
            p = np.full(idx.shape, model.p[t])
        else:
            width = min(t, model.k)
            ctx = (idx >> (t - width)) & ((1 << width) - 1)
            p = model.p1[model.offsets[t] + ctx]
        prob *= np.where(bit == 1, p, 1.0 - p)
    total = prob.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValidationError(f"model probabilities sum to {total!r}")
    return ExplicitDistribution(n, prob / total)


# ----------------------------------------------------------- capacity ---

@dataclass(frozen=True)
class SweepRow:
    k: int
    parameter_count: int
    fidelity: float
    standard_error: float
    dataset_tag: str


def capacity_sweep(datasets, orders, seed: int = 0, sample_count: int = SWEEP_SAMPLES,
                   alpha: float = DEFAULT_ALPHA) -> list[SweepRow]:
    """Fit AR(k) for every (dataset, k) and score it by XEB on ``sample_count``
    model samples. ``datasets`` holds (tag, samples, truth distribution)."""
    rows = []
    for di, (tag, samples, truth) in enumerate(datasets):
        for k in orders:
            model = fit_ar(samples, k, alpha)
            gen = model_sample(model, sample_count, Prng(derive_seed(seed, di * 1000 + k)))
            r = xeb(gen, truth)
            rows.append(SweepRow(k, model.parameter_count, r.fidelity, r.standard_error, tag))
    return rows


def sweep_csv(rows: list[SweepRow]) -> str:
    return csv_text(["k", "params", "fidelity", "stderr", "dataset_tag"],
                    [(r.k, r.parameter_count, r.fidelity, r.standard_error, r.dataset_tag) for r in rows])


# --------------------------------------------------------------- files ---

def model_to_json(model) -> str:
    if isinstance(model, ProductModel):
        doc = {"type": "product", "n": model.n, "k": None, "alpha": None,
               "entries": [[t, "", float(p)] for t, p in enumerate(model.p)]}
    else:
        doc = {"type": "ar", "n": model.n, "k": model.k, "alpha": model.alpha,
               "entries": [list(e) for e in model.entries()]}
    return json.dumps(doc, separators=(",", ":")) + "\n"


def model_from_json(text: str):
    try:
        doc = json.loads(text)
        kind, n = doc["type"], int(doc["n"])
        entries = doc["entries"]
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"malformed model file: {exc}") from None
    if kind == "product":
        p = np.zeros(n)
        for t, _, v in entries:
            p[int(t)] = float(v)
        return ProductModel(n, p)
    if kind != "ar":
        raise ParseError(f"unknown model type {kind!r}", field="type")
    k = int(doc["k"])
    off = _offsets(n, k)
    p1 = np.full(off[-1], 0.5)
    observed = np.zeros(off[-1], dtype=bool)
    for t, ctx, v in entries:
        t = int(t)
        if len(ctx) != min(t, k):
            raise ParseError(f"context {ctx!r} has wrong width for position {t}", field="entries")
        key = off[t] + (int(ctx, 2) if ctx else 0)
        p1[key] = float(v)
        observed[key] = True
    return ArTableModel(n, k, float(doc["alpha"]), p1, observed)
