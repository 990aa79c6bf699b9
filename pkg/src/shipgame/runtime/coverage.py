"""Line-coverage aggregation.

The ratio is an exact rational so the activation gate can compare against
its threshold before any rounding happens.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping


@dataclass(frozen=True)
class CoverageReport:
    covered: tuple[int, ...]  # sorted covered line numbers (within the denominator)
    denominator: tuple[int, ...]  # sorted executable line numbers
    ratio: Fraction

    @property
    def percent(self) -> float:
        return float(self.ratio) * 100.0


def merge_coverage(
    hit_maps: Iterable[Mapping[int, int]],
    executable: Iterable[int],
) -> CoverageReport:
    """Union the per-execution hit multisets and relate them to the
    executable-line denominator. An empty denominator means the component
    has no executable statements, which is a level-authoring bug."""
    denominator = tuple(sorted(set(executable)))
    if not denominator:
        raise ValueError("component has no executable lines")
    denom_set = set(denominator)
    covered: set[int] = set()
    for hits in hit_maps:
        for line, count in hits.items():
            if count > 0 and line in denom_set:
                covered.add(line)
    ratio = Fraction(len(covered), len(denominator))
    return CoverageReport(tuple(sorted(covered)), denominator, ratio)
