"""Evaluation maths: XEB, chi-squared, entropy, L1 distance, conditional
bit structure and the a*exp(b*x)+c capacity fit."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .core import ExplicitDistribution, SampleSet, ValidationError

EULER_GAMMA = 0.5772156649015329


# ------------------------------------------------------------------ XEB ---

@dataclass(frozen=True)
class XebResult:
    fidelity: float
    sample_count: int
    standard_error: float


def xeb(samples: SampleSet, truth: ExplicitDistribution, raw: bool = False) -> XebResult:
    """Linear cross-entropy fidelity of ``samples`` against ``truth``.

    Default: F = 2^n * mean(P(s)) - 1, which is 1 for ideal Porter-Thomas
    samples and 0 for uniform ones. ``raw=True`` returns the unnormalised
    2 * sum(P(s)) - 1 over the listed samples.
    """
    if samples.n != truth.n:
        raise ValidationError(f"sample width {samples.n} != distribution width {truth.n}")
    if len(samples) == 0:
        raise ValidationError("xeb needs at least one sample")
    p = np.asarray(truth.probs)[samples.samples]
    N = p.shape[0]
    if raw:
        return XebResult(float(2.0 * p.sum() - 1.0), N, 0.0)
    scaled = p * float(1 << truth.n)
    se = float(scaled.std(ddof=1) / math.sqrt(N)) if N > 1 else 0.0
    return XebResult(float(scaled.mean() - 1.0), N, se)


# ---------------------------------------------------------- chi squared ---

@dataclass(frozen=True)
class Chi2Result:
    statistic: float
    degrees_of_freedom: int
    p_value: float


def _gamma_series_p(a: float, x: float) -> float:
    # P(a, x) by its power series; good for x < a + 1.
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(100000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-17:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf_q(a: float, x: float) -> float:
    # Q(a, x) by modified Lentz continued fraction; good for x >= a + 1.
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 100000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gammaincc(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) for a > 0, x >= 0."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _gamma_series_p(a, x))
    return min(1.0, _gamma_cf_q(a, x))


def chi2_test(observed_counts, null: ExplicitDistribution) -> Chi2Result:
    """Pearson chi-squared of per-bitstring counts against ``null``.

    Bins with zero null probability are dropped (an observation there raises);
    degrees of freedom are the remaining bin count minus one.
    """
    x = np.asarray(observed_counts, dtype=np.float64)
    p = np.asarray(null.probs)
    if x.shape != p.shape:
        raise ValidationError(f"expected {p.shape[0]} bins, got {x.shape}")
    N = x.sum()
    if N <= 0:
        raise ValidationError("no observations")
    live = p > 0
    if np.any(x[~live] > 0):
        raise ValidationError("observed an outcome the null assigns probability 0")
    m = N * p[live]
    stat = float(((x[live] - m) ** 2 / m).sum())
    dof = int(live.sum()) - 1
    if dof < 1 or stat == 0.0:
        return Chi2Result(stat, max(dof, 1), 1.0)
    return Chi2Result(stat, dof, gammaincc(dof / 2.0, stat / 2.0))


# ---------------------------------------------------- entropy, distances --

def entropy(dist: ExplicitDistribution) -> float:
    """Shannon entropy in nats.

    Summed with math.fsum (correctly rounded), so the value does not depend on
    the order of the probabilities.
    """
    p = np.asarray(dist.probs)
    p = p[p > 0]
    return -math.fsum((p * np.log(p)).tolist())


def pt_reference_entropy(n: int) -> float:
    """Entropy of an ideal Porter-Thomas distribution: n ln 2 - 1 + gamma."""
    return n * math.log(2.0) - 1.0 + EULER_GAMMA


def l1_distance(a: ExplicitDistribution, b: ExplicitDistribution) -> float:
    """sum_j |a_j - b_j|; the total variation distance is half of this."""
    if a.n != b.n:
        raise ValidationError(f"width mismatch: {a.n} vs {b.n}")
    return float(np.abs(np.asarray(a.probs) - np.asarray(b.probs)).sum())


def total_variation(a: ExplicitDistribution, b: ExplicitDistribution) -> float:
    return 0.5 * l1_distance(a, b)


# ------------------------------------------------ conditional structure ---

@dataclass
class ConditionalReport:
    n: int
    max_order: int
    # order -> list of (target, conditioning bits, assignment, P(target=1|...))
    tables: dict[int, list[tuple[int, tuple[int, ...], tuple[int, ...], float | None]]] = field(default_factory=dict)
    max_deviation: dict[int, float] = field(default_factory=dict)

    def rows(self):
        for order in sorted(self.tables):
            for target, cond, assign, prob in self.tables[order]:
                yield order, target, cond, assign, prob


def _local_marginal(spectrum: np.ndarray, bits: tuple[int, ...]) -> np.ndarray:
    """Marginal of the bits in ``bits`` (local index k <-> bits[k])."""
    r = len(bits)
    masks = np.zeros(1 << r, dtype=np.int64)
    for k, b in enumerate(bits):
        masks[np.arange(1 << r) >> k & 1 == 1] |= 1 << b
    local = spectrum[masks].copy()
    kernels.fwht_numpy(local)
    return local / (1 << r)


def conditional_report(dist: ExplicitDistribution, max_order: int = 3,
                       undefined_below: float = 1e-12) -> ConditionalReport:
    """P(bit i = 1 | bits S = a) for every target i, every S of size 1..max_order
    not containing i, and every assignment a.

    All marginals come from one Walsh-Hadamard transform of the distribution:
    the marginal on a bit set T only involves the transform coefficients on
    subsets of T.
    """
    n = dist.n
    if not 1 <= max_order <= 3:
        raise ValidationError("max_order must be 1, 2 or 3")
    if max_order >= n:
        raise ValidationError(f"max_order {max_order} needs at least {max_order + 1} bits")
    if max_order == 3 and n > 20:
        raise ValidationError("order-3 conditionals are limited to n <= 20")
    spectrum = np.array(dist.probs, dtype=np.float64)
    kernels.fwht(spectrum)
    report = ConditionalReport(n, max_order)
    for order in range(1, max_order + 1):
        rows = []
        for T in itertools.combinations(range(n), order + 1):
            marg = _local_marginal(spectrum, T)
            for ti, target in enumerate(T):
                cond = tuple(b for b in T if b != target)
                for assign_idx in range(1 << order):
                    assign = tuple((assign_idx >> k) & 1 for k in range(order))
                    base = 0
                    for k, b in enumerate(cond):
                        base |= assign[k] << T.index(b)
                    p0 = marg[base]
                    p1 = marg[base | (1 << ti)]
                    denom = p0 + p1
                    prob = None if denom <= undefined_below else float(min(1.0, max(0.0, p1 / denom)))
                    rows.append((target, cond, assign, prob))
        rows.sort(key=lambda r: (r[0], r[1], r[2]))
        report.tables[order] = rows
        defined = [abs(r[3] - 0.5) for r in rows if r[3] is not None]
        report.max_deviation[order] = max(defined) if defined else 0.0
    return report


# ------------------------------------------------------ exponential fit ---

@dataclass(frozen=True)
class ExpFit:
    a: float
    b: float
    c: float
    rms_residual: float
    degenerate: bool = False

    def __call__(self, x):
        return self.a * np.exp(self.b * np.asarray(x, dtype=float)) + self.c


def _linear_part(x, y, b):
    basis = np.column_stack([np.exp(b * x), np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    resid = y - basis @ coef
    return coef, float(resid @ resid)


def fit_exponential(points, grid: int = 401, bracket_span: float = 20.0) -> ExpFit:
    """Least-squares fit of y = a*exp(b*x) + c.

    For fixed b, (a, c) is linear least squares. b is searched on the bracket
    |b| <= bracket_span / (max x - min x): a uniform grid locates the basin,
    then golden-section search refines it.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 4 or pts.shape[1] != 2:
        raise ValidationError("fit_exponential needs at least 4 (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    if np.unique(x).size != x.size:
        raise ValidationError("x values must be distinct")
    if np.ptp(y) <= 1e-12 * max(1.0, float(np.abs(y).max())):
        return ExpFit(0.0, 0.0, float(y.mean()), 0.0, degenerate=True)
    # centre x so exp(b*x) stays well scaled; a is rescaled afterwards
    x0 = float(x.mean())
    xc = x - x0
    limit = bracket_span / float(np.ptp(x))
    bs = np.linspace(-limit, limit, grid)
    sse = np.array([_linear_part(xc, y, b)[1] for b in bs])
    i = int(np.argmin(sse))
    best = bs[i]
    if 0 < i < grid - 1:
        res = minimize_scalar(lambda b: _linear_part(xc, y, b)[1], bracket=(bs[i - 1], bs[i], bs[i + 1]),
                              method="golden", options={"xtol": 1e-14})
        best = float(res.x)
    (a, c), s = _linear_part(xc, y, best)
    return ExpFit(float(a * math.exp(-best * x0)), float(best), float(c), math.sqrt(s / x.size))


# ------------------------------------------------------------------ CSV ---

def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def xeb_csv(result: XebResult) -> str:
    return csv_text(["F", "N", "stderr"], [(result.fidelity, result.sample_count, result.standard_error)])


def chi2_csv(result: Chi2Result) -> str:
    return csv_text(["stat", "dof", "p"], [(result.statistic, result.degrees_of_freedom, result.p_value)])


def conditional_csv(report: ConditionalReport) -> str:
    def bits(t):
        return " ".join(str(v) for v in t)

    return csv_text(["order", "target", "conditioning", "assignment", "probability"],
                    [(o, t, bits(c), bits(a), "" if p is None else p) for o, t, c, a, p in report.rows()])
