"""Exhaustive search for small Mahler measures in a box of monic integer polynomials.

Only one polynomial per symmetry class is measured.  The class of a monic
``p`` of degree ``d`` is generated by ``(-1)**d p(-z)`` and, when the constant
term is a unit, by ``a_0 z**d p(1/z)``; all members share their roots up to
sign and inversion and hence their Mahler measure.  The representative kept
is the member whose coefficient tuple, read from the top degree down, is
lexicographically largest.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classical import MeasureResult, mahler_roots
from .errors import ArgumentError, InconclusiveError, SearchTooLargeError
from .polynomials import IntPolynomial, is_cyclotomic

DEFAULT_CAP = 1_000_000
#: measures at or below this are treated as exactly 1 (Kronecker's theorem)
TRIVIAL_MARGIN = 1e-9
#: measures below this are sent to the exact cyclotomic test with the candidates
SCREEN_MARGIN = 1e-6
BATCH = 20000

QUOTIENT_NOTE = (
    "one representative per class {p(z), (-1)^d p(-z), a0 z^d p(1/z), (-1)^d a0 (-z)^d p(-1/z)}; "
    "reversal applies only when |a0| = 1; representative has the largest descending coefficient tuple"
)


@dataclass
class SearchReport:
    degree_max: int
    height_max: int
    threshold: float
    candidates: list = field(default_factory=list)
    enumerated: int = 0
    skipped_zero_constant: int = 0
    skipped_equivalent: int = 0
    skipped_cyclotomic: int = 0
    skipped_kronecker_trivial: int = 0
    inconclusive: int = 0
    min_measure_seen: float = float("inf")
    quotient: str = QUOTIENT_NOTE

    def to_dict(self) -> dict:
        return {
            "degree_max": self.degree_max,
            "height_max": self.height_max,
            "threshold": self.threshold,
            "candidates": [
                {"poly": list(p.coeffs), **m.to_dict()} for p, m in self.candidates
            ],
            "enumerated": self.enumerated,
            "skipped_zero_constant": self.skipped_zero_constant,
            "skipped_equivalent": self.skipped_equivalent,
            "skipped_cyclotomic": self.skipped_cyclotomic,
            "skipped_kronecker_trivial": self.skipped_kronecker_trivial,
            "inconclusive": self.inconclusive,
            "min_measure_seen": self.min_measure_seen,
            "quotient": self.quotient,
        }


def box_cardinality(degree_max: int, height_max: int) -> int:
    """Number of monic polynomials of degree 1..degree_max with bounded height (all constants)."""
    b = 2 * height_max + 1
    return sum(b**d for d in range(1, degree_max + 1))


def _keys(low: np.ndarray, height: int) -> np.ndarray:
    """Integer key ordering rows of ascending low coefficients by descending tuple."""
    base = 2 * height + 1
    weights = base ** np.arange(low.shape[1], dtype=np.int64)
    return (low + height).astype(np.int64) @ weights


def canonical_mask(low: np.ndarray, height: int) -> np.ndarray:
    """Rows (coefficients a_0..a_{d-1} of a monic p) that are class representatives."""
    d = low.shape[1]
    k = np.arange(d)
    key = _keys(low, height)
    best = key.copy()
    neg = low * np.where((d - k) % 2 == 0, 1, -1)
    np.maximum(best, _keys(neg, height), out=best)
    unit = np.abs(low[:, 0]) == 1
    if unit.any():
        a0 = low[unit, 0][:, None]
        full = np.concatenate([low[unit], np.ones((unit.sum(), 1), dtype=low.dtype)], axis=1)
        rev = a0 * full[:, ::-1]
        rev_low = rev[:, :d]
        rev_neg = rev_low * np.where((d - k) % 2 == 0, 1, -1)
        alt = np.maximum(_keys(rev_low, height), _keys(rev_neg, height))
        best[unit] = np.maximum(best[unit], alt)
    return key == best


def _batch_measures(low: np.ndarray) -> np.ndarray:
    """Mahler measures of monic polynomials from companion-matrix eigenvalues."""
    n, d = low.shape
    comp = np.zeros((n, d, d))
    comp[:, 0, :] = -low[:, ::-1]
    if d > 1:
        idx = np.arange(d - 1)
        comp[:, idx + 1, idx] = 1.0
    eig = np.linalg.eigvals(comp)
    return np.prod(np.maximum(1.0, np.abs(eig)), axis=1)


def _scan(task):
    """Worker: scan one slice of the degree-d box; returns counts and flagged rows."""
    degree, height, start, stop, threshold = task
    values = range(-height, height + 1)
    # a_0 runs over nonzero values only; product order fixes a deterministic layout
    rows = itertools.islice(
        itertools.product(*([values] * (degree - 1)), [v for v in values if v != 0]),
        start,
        stop,
    )
    hi_first = np.array(list(rows), dtype=np.int64).reshape(-1, degree)
    low = hi_first[:, ::-1]
    mask = canonical_mask(low, height)
    kept = low[mask]
    measures = _batch_measures(kept) if len(kept) else np.zeros(0)
    flagged = []
    min_seen = float("inf")
    for row, m in zip(kept, measures):
        if m <= 1.0 + SCREEN_MARGIN or m < threshold:
            flagged.append((tuple(int(x) for x in row) + (1,), float(m)))
        else:
            # unflagged rows never reach the exact pass, so record them here
            min_seen = min(min_seen, float(m))
    return {
        "enumerated": stop - start,
        "equivalent": int((~mask).sum()),
        "flagged": flagged,
        "min_seen": min_seen,
    }


def lehmer_search(
    degree_max: int,
    height_max: int,
    threshold: float = 1.3,
    jobs: int = 1,
    cap: int = DEFAULT_CAP,
) -> SearchReport:
    """All class representatives with ``1 < M(p) < threshold`` in the box, sorted by measure."""
    if not 1 <= degree_max <= 12:
        raise ArgumentError("degree_max must be in 1..12")
    if not 1 <= height_max <= 3:
        raise ArgumentError("height_max must be in 1..3")
    card = box_cardinality(degree_max, height_max)
    if card > cap:
        raise SearchTooLargeError(
            f"search box has {card} polynomials, above the cap {cap}", cardinality=card
        )
    report = SearchReport(degree_max, height_max, threshold)
    b = 2 * height_max + 1
    tasks = []
    for d in range(1, degree_max + 1):
        report.skipped_zero_constant += b ** (d - 1)
        total = b ** (d - 1) * (b - 1)
        for start in range(0, total, BATCH):
            tasks.append((d, height_max, start, min(start + BATCH, total), threshold))
    report.enumerated = card
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_scan, tasks))
    else:
        parts = [_scan(t) for t in tasks]

    found = []
    for part in parts:
        report.skipped_equivalent += part["equivalent"]
        report.min_measure_seen = min(report.min_measure_seen, part["min_seen"])
        for coeffs, _ in part["flagged"]:
            p = IntPolynomial(coeffs)
            try:
                if is_cyclotomic(p):
                    report.skipped_cyclotomic += 1
                    continue
            except InconclusiveError:
                report.inconclusive += 1
                continue
            res = mahler_roots(p)
            if res.value <= 1.0 + TRIVIAL_MARGIN:
                report.skipped_kronecker_trivial += 1
                continue
            report.min_measure_seen = min(report.min_measure_seen, res.value)
            if res.value < threshold:
                found.append((p, res))
    found.sort(key=lambda item: (item[1].value, item[0].coeffs[::-1]))
    report.candidates = found
    return report
