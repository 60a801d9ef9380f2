"""Bigram association measures from a 2x2 contingency table.

Cell notation follows the collocation literature::

                 w2        not w2
    w1          O11         O12      | R1
    not w1      O21         O22      | R2
                ---         ---
                C1          C2         N

with expected frequencies ``Eij = Ri * Cj / N`` under independence.
Scores that are undefined for a given table are returned as NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import BigramTable, lookup_key
from .errors import ConfigurationError

MARGINS = ("unigram", "bigram")

AM_NAMES = (
    "pmi",
    "t_score",
    "z_score",
    "log_likelihood",
    "simple_ll",
    "dice",
    "deltap_2g1",
    "deltap_1g2",
)


@dataclass(frozen=True)
class ContingencyTable:
    o11: float
    o12: float
    o21: float
    o22: float

    def __post_init__(self):
        if min(self.o11, self.o12, self.o21, self.o22) < 0:
            raise ValueError(f"negative contingency cell in {self}")
        if self.n <= 0:
            raise ValueError("contingency table is empty")

    @property
    def n(self) -> float:
        return self.o11 + self.o12 + self.o21 + self.o22

    @property
    def r1(self) -> float:
        return self.o11 + self.o12

    @property
    def r2(self) -> float:
        return self.o21 + self.o22

    @property
    def c1(self) -> float:
        return self.o11 + self.o21

    @property
    def c2(self) -> float:
        return self.o12 + self.o22

    def observed(self) -> tuple[float, float, float, float]:
        return self.o11, self.o12, self.o21, self.o22

    def expected(self) -> tuple[float, float, float, float]:
        n = self.n
        return (
            self.r1 * self.c1 / n,
            self.r1 * self.c2 / n,
            self.r2 * self.c1 / n,
            self.r2 * self.c2 / n,
        )

    @property
    def e11(self) -> float:
        return self.r1 * self.c1 / self.n


def contingency(
    table: BigramTable, w1: str, w2: str, margins: str = "unigram"
) -> ContingencyTable | None:
    """Contingency table of the adjacent pair ``(w1, w2)``.

    With ``margins="unigram"`` the margins are the unigram corpus
    frequencies and ``N`` the corpus size. With ``margins="bigram"`` they
    count bigram tokens with ``w1`` first and ``w2`` second, and ``N`` is
    the number of bigram tokens. Returns None when either word is unknown
    to the table or the margins are inconsistent.
    """
    k1, k2 = lookup_key(w1), lookup_key(w2)
    if margins == "unigram":
        f1 = table.unigram_counts.get(k1, 0)
        f2 = table.unigram_counts.get(k2, 0)
        n = table.corpus_size
    elif margins == "bigram":
        first, second, n = table.pair_margins
        f1 = first.get(k1, 0)
        f2 = second.get(k2, 0)
    else:
        raise ConfigurationError(f"margins must be one of {MARGINS}, got {margins!r}")
    if f1 <= 0 or f2 <= 0:
        return None
    f12 = table.bigram_counts.get((k1, k2), 0)
    o22 = n - f1 - f2 + f12
    if o22 < 0:
        # only reachable for a repeated word in a tiny corpus
        return None
    return ContingencyTable(
        o11=float(f12), o12=float(f1 - f12), o21=float(f2 - f12), o22=float(o22)
    )


def _xlogy_ratio(o: float, e: float) -> float:
    # 0 * ln(0 / e) is taken as 0
    if o == 0:
        return 0.0
    return o * math.log(o / e)


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else math.nan


def am_scores(t: ContingencyTable) -> dict[str, float]:
    """All eight association scores of one contingency table.

    PMI uses base-2 logarithms, the likelihood measures natural logs. PMI
    and t-score are NaN when the pair never occurs (``O11 == 0``).
    """
    o11 = t.o11
    e11, e12, e21, e22 = t.expected()
    observed = t.observed()
    expected = (e11, e12, e21, e22)

    if o11 > 0:
        pmi = math.log2(o11 / e11)
        t_score = (o11 - e11) / math.sqrt(o11)
    else:
        pmi = t_score = math.nan
    z_score = (o11 - e11) / math.sqrt(e11) if e11 > 0 else math.nan

    if all(e > 0 or o == 0 for o, e in zip(observed, expected)):
        ll = 2.0 * sum(_xlogy_ratio(o, e) for o, e in zip(observed, expected))
        # the sum is a KL-type divergence and can only go negative by rounding
        log_likelihood = max(ll, 0.0)
    else:
        log_likelihood = math.nan
    simple_ll = 2.0 * (_xlogy_ratio(o11, e11) - (o11 - e11)) if e11 > 0 else math.nan

    return {
        "pmi": pmi,
        "t_score": t_score,
        "z_score": z_score,
        "log_likelihood": log_likelihood,
        "simple_ll": simple_ll,
        "dice": _ratio(2.0 * o11, t.r1 + t.c1),
        "deltap_2g1": _ratio(o11, t.r1) - _ratio(t.o21, t.r2),
        "deltap_1g2": _ratio(o11, t.c1) - _ratio(t.o12, t.c2),
    }


def missing_scores() -> dict[str, float]:
    return dict.fromkeys(AM_NAMES, math.nan)
