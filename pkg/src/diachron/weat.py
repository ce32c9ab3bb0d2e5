"""Pleasant-vs-unpleasant association scoring and event-window statistics.

For one slice, a group's score is its mean association with the pleasant
attribute set minus its mean association with the unpleasant set.  Annual
series of these scores are compared around historical events with Welch's
two-sample t-test and Cohen's d (pooled).  The t distribution is evaluated
with an in-house regularized incomplete beta (continued fraction), so the
package needs no statistics dependency; the test samples are the per-label
per-year scores inside each window, which matches the granularity implied by
large reported degrees of freedom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import TimeSlice
from .errors import DegenerateVarianceError
from .lexicon import AttributeSets, SocialGroup
from .sgns import EmbeddingSpace

DEFAULT_WINDOW_YEARS = 5

# Built-in event registry; configs may extend or replace it.
DEFAULT_EVENTS: dict[int, str] = {
    1966: "Cultural Revolution onset",
    1978: "Reform and Opening Up",
}


# ---------------------------------------------------------------------------
# scoring


def _label_components(
    space: EmbeddingSpace, labels: Sequence[str], attrs: AttributeSets
) -> dict[str, float] | None:
    """Per-label pleasant-minus-unpleasant score, skipping OOV attribute words.

    ``None`` when either attribute side has no in-vocabulary word or no label
    is in vocabulary.  The group score is the mean of these components.
    """
    pleasant = [u for u in (space.unit_vector(w) for w in attrs.pleasant) if u is not None]
    unpleasant = [u for u in (space.unit_vector(w) for w in attrs.unpleasant) if u is not None]
    if not pleasant or not unpleasant:
        return None
    scores: dict[str, float] = {}
    for label in labels:
        unit = space.unit_vector(label)
        if unit is None:
            continue
        mean_p = float(np.mean([unit @ v for v in pleasant]))
        mean_u = float(np.mean([unit @ v for v in unpleasant]))
        scores[label] = mean_p - mean_u
    return scores or None


def weat_score(
    space: EmbeddingSpace, labels: Sequence[str], attrs: AttributeSets
) -> float | None:
    components = _label_components(space, labels, attrs)
    if components is None:
        return None
    return float(np.mean(list(components.values())))


@dataclass
class WeatPoint:
    year: int
    score: float
    label_scores: list[tuple[str, float]]


@dataclass
class WeatSeries:
    group_id: str
    points: list[WeatPoint]

    def years(self) -> list[int]:
        return [p.year for p in self.points]


def weat_series(
    annual_spaces: Mapping[TimeSlice, EmbeddingSpace],
    group: SocialGroup,
    attrs: AttributeSets,
) -> tuple[WeatSeries, list[int]]:
    """Score each annual slice; returns the series plus years with no score."""
    points: list[WeatPoint] = []
    missing: list[int] = []
    for ts in sorted(annual_spaces):
        space = annual_spaces[ts]
        components = _label_components(space, group.labels_for(ts), attrs)
        if components is None:
            missing.append(ts.start_year)
            continue
        score = float(np.mean(list(components.values())))
        points.append(
            WeatPoint(ts.start_year, score, sorted(components.items()))
        )
    return WeatSeries(group.id, points), missing


# ---------------------------------------------------------------------------
# statistics


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    max_iter = 300
    eps = 3e-16
    fpmin = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < eps:
            return h
    raise ArithmeticError(f"incomplete beta failed to converge for a={a}, b={b}, x={x}")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: float) -> float:
    """Upper-tail probability P(T > t) for Student's t with ``df`` degrees."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    x = df / (df + t * t)
    half = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x)
    return half if t >= 0 else 1.0 - half


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> tuple[float, float, float]:
    """Welch's unequal-variance t-test of ``b`` against ``a``.

    Returns ``(t, df, p)`` with the two-tailed p-value; ``t`` is positive when
    ``b`` has the larger mean.
    """
    xa = np.asarray(a, dtype=np.float64)
    xb = np.asarray(b, dtype=np.float64)
    if len(xa) < 2 or len(xb) < 2:
        raise ValueError("insufficient samples: need at least 2 per side")
    na, nb = len(xa), len(xb)
    va = float(xa.var(ddof=1))
    vb = float(xb.var(ddof=1))
    se2 = va / na + vb / nb
    mean_diff = float(xb.mean() - xa.mean())
    if se2 == 0.0:
        if mean_diff == 0.0:
            return 0.0, float(na + nb - 2), 1.0
        raise DegenerateVarianceError("degenerate variance: zero spread, unequal means")
    t = mean_diff / math.sqrt(se2)
    df = se2 * se2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    p = 2.0 * student_t_sf(abs(t), df)
    return t, df, min(p, 1.0)


def cohens_d(a: Sequence[float], b: Sequence[float]) -> float:
    """Pooled-variance effect size of ``b`` relative to ``a``."""
    xa = np.asarray(a, dtype=np.float64)
    xb = np.asarray(b, dtype=np.float64)
    if len(xa) < 2 or len(xb) < 2:
        raise ValueError("insufficient samples: need at least 2 per side")
    na, nb = len(xa), len(xb)
    pooled_var = ((na - 1) * xa.var(ddof=1) + (nb - 1) * xb.var(ddof=1)) / (na + nb - 2)
    mean_diff = float(xb.mean() - xa.mean())
    if pooled_var == 0.0:
        if mean_diff == 0.0:
            return 0.0
        raise DegenerateVarianceError("degenerate variance: zero spread, unequal means")
    return mean_diff / math.sqrt(pooled_var)


# ---------------------------------------------------------------------------
# event windows


@dataclass
class EventImpact:
    group_id: str
    event_year: int
    window_years: int
    pre_samples: list[float]
    post_samples: list[float]
    t_statistic: float
    degrees_of_freedom: float
    p_value: float
    cohens_d: float


def event_impact(
    series: WeatSeries, event_year: int, window_years: int = DEFAULT_WINDOW_YEARS
) -> EventImpact:
    """Compare per-label scores before and after an event year.

    The pre window covers the ``window_years`` years strictly before the
    event; the post window starts at the event year itself.  Samples are the
    per-label per-year scores, so several labels per year each contribute one
    observation.
    """
    if window_years < 1:
        raise ValueError("window_years must be >= 1")
    pre: list[float] = []
    post: list[float] = []
    for point in series.points:
        if event_year - window_years <= point.year <= event_year - 1:
            pre.extend(score for _, score in point.label_scores)
        elif event_year <= point.year <= event_year + window_years - 1:
            post.extend(score for _, score in point.label_scores)
    if len(pre) < 2 or len(post) < 2:
        raise ValueError(
            f"insufficient samples around {event_year}: pre={len(pre)}, post={len(post)}"
        )
    t, df, p = welch_t_test(pre, post)
    d = cohens_d(pre, post)
    return EventImpact(
        group_id=series.group_id,
        event_year=event_year,
        window_years=window_years,
        pre_samples=pre,
        post_samples=post,
        t_statistic=t,
        degrees_of_freedom=df,
        p_value=p,
        cohens_d=d,
    )
