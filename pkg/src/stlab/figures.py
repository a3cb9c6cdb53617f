"""Reproduction of the published tables: which statistic, which K, and the
expected values bundled in data/figures.toml."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from importlib import resources

from .angles import build_sequence
from .config import RunConfig, tomllib
from .discrepancy import WindowPointSet, check_budget, star_discrepancy
from .errors import InvalidFigureError
from .measure import builtin_test_function
from .windows import REFERENCE_DIGITS, relerr_logslope, window_average

FIGURES = range(1, 19)
# cells costing hours (or tens of minutes) run only with --long
LONG_K = {"average": math.inf, "logslope": 500_000, "discrepancy": 50_000}


@dataclass(frozen=True)
class FigureSpec:
    number: int
    kind: str
    function: str | None
    s: int
    Ks: tuple
    tolerance: float
    expected: dict
    reference_digits: int = REFERENCE_DIGITS

    def is_long(self, K: int) -> bool:
        if self.kind == "discrepancy" and self.s == 3:
            return True
        return K > LONG_K[self.kind]


@dataclass
class Cell:
    figure: int
    curve: str
    K: int
    computed: float | None
    expected: float | None
    abs_diff: float | None
    within_tol: bool | None
    skipped: bool = False

    def as_dict(self):
        return asdict(self)


@lru_cache(maxsize=None)
def _table():
    text = resources.files("stlab.data").joinpath("figures.toml").read_text()
    return tomllib.loads(text)["figure"]


def figure_spec(number: int) -> FigureSpec:
    try:
        number = int(number)
    except (TypeError, ValueError):
        raise InvalidFigureError(f"invalid figure {number!r}") from None
    if number not in FIGURES:
        raise InvalidFigureError(f"figure must be in 1..18, got {number}")
    raw = dict(_table()[str(number)])
    Ks = tuple(raw.pop("K"))
    spec = FigureSpec(number, raw.pop("kind"), raw.pop("function", None), raw.pop("s"),
                      Ks, raw.pop("tolerance"), {},
                      raw.pop("reference_digits", REFERENCE_DIGITS))
    expected = {lab: dict(zip(Ks, vals)) for lab, vals in raw.items()}
    return FigureSpec(**{**spec.__dict__, "expected": expected})


def compute_cell(spec: FigureSpec, cfg: RunConfig, label: str, K: int) -> float:
    curve = cfg.curve(label)
    if spec.kind == "discrepancy":
        check_budget(spec.s, K, cfg.budgets)
    seq = build_sequence(curve, K + spec.s - 1, cfg.cache_dir, cfg.thresholds, cfg.threads)
    if spec.kind == "discrepancy":
        pts = WindowPointSet.from_angles(seq, spec.s, K)
        return star_discrepancy(pts, budgets=cfg.budgets).log_slope
    f = _test_function(spec.function, spec.s)
    if spec.kind == "average":
        return window_average(seq, f, K, cfg.threads)
    return relerr_logslope(seq, f, K, cfg.threads, digits=spec.reference_digits).log_slope


@lru_cache(maxsize=8)
def _test_function(name, s):
    return builtin_test_function(name, s)


def reproduce(number: int, cfg: RunConfig, rows=None, cols=None,
              long: bool = False) -> list[Cell]:
    """Compute the requested cells of a figure alongside the printed values."""
    spec = figure_spec(number)
    rows = list(rows) if rows else cfg.labels
    Ks = [int(k) for k in cols] if cols else list(spec.Ks)
    for K in Ks:
        if K not in spec.Ks:
            raise InvalidFigureError(f"figure {number} has no column K={K}")
    cells = []
    for label in rows:
        cfg.curve(label)
        for K in Ks:
            exp = spec.expected.get(label, {}).get(K)
            if spec.is_long(K) and not long:
                cells.append(Cell(number, label, K, None, exp, None, None, skipped=True))
                continue
            val = compute_cell(spec, cfg, label, K)
            diff = None if exp is None else abs(val - exp)
            ok = None if diff is None else diff <= spec.tolerance
            cells.append(Cell(number, label, K, val, exp, diff, ok))
    return cells
