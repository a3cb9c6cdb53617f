"""Run configuration loaded from TOML."""
from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .curves import RationalCurve
from .discrepancy import DEFAULT_BUDGETS
from .errors import DomainError, UnknownNameError
from .trace import Thresholds

ENV_CACHE = "STLAB_CACHE_DIR"
FORMATS = ("csv", "json")


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "stlab"


@dataclass
class RunConfig:
    curves: list[RationalCurve]
    cache_dir: Path = field(default_factory=default_cache_dir)
    thresholds: Thresholds = field(default_factory=Thresholds)
    budgets: dict = field(default_factory=lambda: dict(DEFAULT_BUDGETS))
    output_format: str = "csv"
    threads: int = 1

    def __post_init__(self):
        labels = [c.label for c in self.curves]
        if len(set(labels)) != len(labels):
            raise DomainError("curve labels must be unique")
        if any(int(v) <= 0 for v in self.budgets.values()):
            raise DomainError("budgets must be positive")
        if self.output_format not in FORMATS:
            raise DomainError(f"format must be one of {FORMATS}")
        if self.threads < 1:
            raise DomainError("threads must be >= 1")

    def curve(self, label: str) -> RationalCurve:
        for c in self.curves:
            if c.label == label:
                return c
        raise UnknownNameError(
            f"unknown curve {label!r}; known: {', '.join(c.label for c in self.curves)}")

    @property
    def labels(self) -> list[str]:
        return [c.label for c in self.curves]


def parse_threads(value) -> int:
    if value in (None, "auto"):
        return os.cpu_count() or 1
    n = int(value)
    if n < 1:
        raise DomainError("threads must be >= 1")
    return n


def curves_from_toml(data: dict) -> list[RationalCurve]:
    out = []
    for entry in data.get("curve", []):
        try:
            out.append(RationalCurve(str(entry["label"]), tuple(entry["a"]),
                                     int(entry["conductor"]), int(entry.get("rank", 0))))
        except KeyError as exc:
            raise DomainError(f"curve entry missing key {exc}") from None
    return out


def default_curves() -> list[RationalCurve]:
    text = resources.files("stlab.data").joinpath("curves.toml").read_text()
    return curves_from_toml(tomllib.loads(text))


def load_config(path: os.PathLike | str | None = None) -> RunConfig:
    """Read a TOML configuration; missing pieces fall back to defaults.

    Recognised keys: [[curve]] (label, a, conductor, rank), cache_dir,
    format, threads, [thresholds] naive/charsum, [budgets] s1/s2/s3.
    STLAB_CACHE_DIR overrides cache_dir.
    """
    data = {}
    if path is not None:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    curves = curves_from_toml(data) or default_curves()
    th = data.get("thresholds", {})
    thresholds = Thresholds(int(th.get("naive", Thresholds.naive)),
                            int(th.get("charsum", Thresholds.charsum)))
    budgets = dict(DEFAULT_BUDGETS)
    for key, val in data.get("budgets", {}).items():
        budgets[int(key.lstrip("s"))] = int(val)
    cache_dir = Path(data["cache_dir"]) if "cache_dir" in data else default_cache_dir()
    if os.environ.get(ENV_CACHE):
        cache_dir = Path(os.environ[ENV_CACHE])
    return RunConfig(curves=curves, cache_dir=cache_dir, thresholds=thresholds,
                     budgets=budgets, output_format=data.get("format", "csv"),
                     threads=parse_threads(data.get("threads", 1)))
