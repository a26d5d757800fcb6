"""Flat ``key = value`` pipeline configuration.

Every default lives in :data:`DEFAULTS`; the README reproduces the table.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .regularize import Growth, GrowthFunctions

SECTION = "pipeline"

DEFAULTS: dict[str, str] = {
    "system": "",
    "output_dir": "out",
    "H": "2,2,0",
    "R_target": "2",
    "threshold": "",
    "coeff_height": "1",
    "height_bound": "1",
    "rank_budget": "2000",
    "max_steps": "200",
    "max_rounds": "10",
    "birch_primes": "7,11,13",
    "cleanup_primes": "5,7,11",
    "sbound": "2000000",
    "enum_cap": "10000000",
    "p_max": "30",
    "precision": "8",
    "delta_max": "2",
    "padic_budget": "10000000",
    "seed": "0",
    "real_budget": "200",
    "real_tolerance": "1e-9",
    "N": "100,1000",
    "count_cap": "2000000000",
    "sample_limit": "10",
}


class ConfigError(ValueError):
    pass


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(float(x)) for x in text.replace(" ", "").split(",") if x)


@dataclass(frozen=True)
class PipelineConfig:
    system: Path
    output_dir: Path
    growth: GrowthFunctions
    threshold: int | None = None
    coeff_height: int = 1
    height_bound: int = 1
    rank_budget: int = 2000
    max_steps: int = 200
    max_rounds: int = 10
    birch_primes: tuple[int, ...] = (7, 11, 13)
    cleanup_primes: tuple[int, ...] = (5, 7, 11)
    sbound: int = 2 * 10**6
    enum_cap: int = 10**7
    p_max: int = 30
    precision: int = 8
    delta_max: int = 2
    padic_budget: int = 10**7
    seed: int = 0
    real_budget: int = 200
    real_tolerance: float = 1e-9
    N: tuple[int, ...] = (100, 1000)
    count_cap: int = 2 * 10**9
    sample_limit: int = 10
    raw: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        caps = ("rank_budget", "max_steps", "max_rounds", "sbound", "enum_cap", "padic_budget",
                "real_budget", "count_cap", "precision", "p_max")
        for name in caps:
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not self.N or any(b <= a for a, b in zip(self.N, self.N[1:])):
            raise ConfigError("N schedule must be non-empty and strictly increasing")
        if self.N[0] < 2:
            raise ConfigError("N values must be at least 2")
        if self.delta_max < 0 or self.coeff_height < 1 or self.height_bound < 1:
            raise ConfigError("delta_max must be >= 0, coeff_height and height_bound >= 1")

    def describe(self) -> str:
        return "\n".join(f"{k} = {v}" for k, v in sorted(self.raw.items()))


def parse_config(text: str, base: Path | None = None) -> PipelineConfig:
    """Parse the flat format; relative paths resolve against ``base``."""
    if not text.lstrip().startswith("["):
        text = f"[{SECTION}]\n" + text
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if SECTION not in cp:
        raise ConfigError(f"config needs a [{SECTION}] section")
    given = dict(cp[SECTION])
    unknown = [k for k in given if k not in DEFAULTS and not (k.startswith("H") and k[1:].isdigit())]
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    vals = {**DEFAULTS, **given}
    base = base or Path.cwd()
    try:
        per_degree = {int(k[1:]): Growth.parse(v) for k, v in vals.items() if k[0] == "H" and k[1:].isdigit()}
        growth = GrowthFunctions(per_degree, Growth.parse(vals["H"]), Growth.parse(vals["R_target"]))
        cfg = PipelineConfig(
            system=(base / vals["system"]) if vals["system"] else Path(),
            output_dir=base / vals["output_dir"],
            growth=growth,
            threshold=int(vals["threshold"]) if vals["threshold"] else None,
            coeff_height=int(vals["coeff_height"]),
            height_bound=int(vals["height_bound"]),
            rank_budget=int(vals["rank_budget"]),
            max_steps=int(vals["max_steps"]),
            max_rounds=int(vals["max_rounds"]),
            birch_primes=_ints(vals["birch_primes"]),
            cleanup_primes=_ints(vals["cleanup_primes"]),
            sbound=int(float(vals["sbound"])),
            enum_cap=int(float(vals["enum_cap"])),
            p_max=int(vals["p_max"]),
            precision=int(vals["precision"]),
            delta_max=int(vals["delta_max"]),
            padic_budget=int(float(vals["padic_budget"])),
            seed=int(vals["seed"]),
            real_budget=int(vals["real_budget"]),
            real_tolerance=float(vals["real_tolerance"]),
            N=_ints(vals["N"]),
            count_cap=int(float(vals["count_cap"])),
            sample_limit=int(vals["sample_limit"]),
            raw={k: vals[k] for k in vals if k not in ("system", "output_dir")},
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    if not growth.is_monotone():
        raise ConfigError("growth functions must be non-decreasing in R and d")
    return cfg


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    return parse_config(path.read_text(), path.parent)
