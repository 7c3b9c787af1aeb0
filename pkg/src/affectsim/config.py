"""Simulation configuration: dataclasses, TOML loading and validation.

TOML keys follow the model's symbols (``m``, ``d``, ``sigma``, ``vartheta``,
``gamma_forget``, ``num_all``, ``fragments``). Validation failures raise
:class:`ConfigError` naming the offending field.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any

import tomli

from .dynamics import EsefParams, RateWeights
from .emotion import MutationParams
from .network import InitConfig

SEED_ENV = "AFFECTSIM_SEED"
PRESETS = ("table1", "single_info", "election")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class GraphSpec:
    kind: str = "hybrid"
    ba_fraction: float = 0.5
    m_attach: int = 3
    k: int = 6
    p_rewire: float = 0.1
    bridge_edges: int = 50


@dataclass(frozen=True)
class FragmentSpec:
    etv: int
    duration: int


@dataclass(frozen=True)
class SimConfig:
    fragments: tuple[FragmentSpec, ...]
    gamma_forget: float
    num_all: int = 3000
    esef: EsefParams = EsefParams()
    weights: RateWeights = RateWeights()
    mutation: MutationParams = MutationParams()
    init: InitConfig = InitConfig()
    graph: GraphSpec = GraphSpec()
    seed: int = 0
    p_abstain: float = 0.015
    meanfield_dt: float = 0.01
    meanfield_i0: float = 0.01
    name: str = field(default="", compare=False)

    @property
    def m(self) -> int:
        return self.esef.m

    @property
    def total_rounds(self) -> int:
        return sum(f.duration for f in self.fragments)

    def with_seed(self, seed: int) -> "SimConfig":
        return replace(self, seed=int(seed))

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d.pop("name")
        d["fragments"] = [asdict(f) for f in self.fragments]
        return d

    def config_hash(self, include_seed: bool = False) -> str:
        """SHA-256 of the canonical JSON of every semantic field."""
        d = self.to_dict()
        if not include_seed:
            d.pop("seed")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


_REQUIRED = ("m", "d", "sigma", "vartheta", "gamma_forget", "num_all", "fragments")


def _num(raw: dict, key: str, kind=float, *, lo=None, hi=None, prefix="", default=None):
    name = prefix + key
    if key not in raw:
        if default is None:
            raise ConfigError(name, "missing required field")
        return default
    val = raw[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(name, f"expected a number, got {val!r}")
    if kind is int:
        if isinstance(val, float) and not val.is_integer():
            raise ConfigError(name, f"expected an integer, got {val!r}")
        val = int(val)
    else:
        val = float(val)
    if lo is not None and val < lo:
        raise ConfigError(name, f"must be >= {lo}, got {val}")
    if hi is not None and val > hi:
        raise ConfigError(name, f"must be <= {hi}, got {val}")
    return val


def from_dict(raw: dict[str, Any], name: str = "") -> SimConfig:
    for key in _REQUIRED:
        if key not in raw:
            raise ConfigError(key, "missing required field")
    m = _num(raw, "m", int, lo=2)
    if m % 2:
        raise ConfigError("m", f"must be even, got {m}")
    d = _num(raw, "d", lo=0.0)
    if d == 0:
        raise ConfigError("d", "must be positive")
    sigma = _num(raw, "sigma", lo=0.0)
    if sigma == 0:
        raise ConfigError("sigma", "must be positive")
    vartheta = _num(raw, "vartheta", lo=0.0)
    gamma_forget = _num(raw, "gamma_forget", lo=0.0, hi=1.0)
    num_all = _num(raw, "num_all", int, lo=2)

    frags_raw = raw["fragments"]
    if not isinstance(frags_raw, list) or not frags_raw:
        raise ConfigError("fragments", "must be a non-empty list of {etv, duration} tables")
    fragments = []
    for i, fr in enumerate(frags_raw):
        p = f"fragments[{i}]."
        if not isinstance(fr, dict):
            raise ConfigError(f"fragments[{i}]", "must be a table with etv and duration")
        fragments.append(FragmentSpec(
            etv=_num(fr, "etv", int, lo=0, hi=m, prefix=p),
            duration=_num(fr, "duration", int, lo=1, prefix=p),
        ))
    total = sum(f.duration for f in fragments)
    if "rounds" in raw:
        rounds = _num(raw, "rounds", int, lo=1)
        if rounds != total:
            raise ConfigError("rounds", f"fragment durations sum to {total}, not {rounds}")

    w = raw.get("weights", {})
    mode = w.get("mode", "normalized")
    if mode == "literal":
        if any(k in w for k in ("gamma", "neighbor", "global")):
            raise ConfigError("weights.mode", "literal mode takes no explicit weights")
        weights = RateWeights.literal(m)
    elif mode == "normalized":
        weights = RateWeights(
            w_gamma=_num(w, "gamma", lo=0.0, prefix="weights.", default=1.0),
            w_neighbor=_num(w, "neighbor", lo=0.0, prefix="weights.", default=0.1),
            w_global=_num(w, "global", lo=0.0, prefix="weights.", default=0.1),
        )
    else:
        raise ConfigError("weights.mode", f"expected 'normalized' or 'literal', got {mode!r}")
    mut = raw.get("mutation", {})
    mutation = MutationParams(_num(mut, "rate", lo=0.0, hi=1.0, prefix="mutation.", default=0.01))

    ini = raw.get("init", {})
    init = InitConfig(
        weight_mu=_num(ini, "weight_mu", prefix="init.", default=0.5),
        weight_sigma=_num(ini, "weight_sigma", lo=0.0, prefix="init.", default=0.15),
        etv_mu=_num(ini, "etv_mu", lo=0.0, hi=m, prefix="init.", default=m / 2),
        etv_sigma=_num(ini, "etv_sigma", lo=0.0, prefix="init.", default=4.0),
        m=m,
    )
    if init.weight_mu <= 0 and init.weight_sigma == 0:
        raise ConfigError("init.weight_mu", "degenerate weight distribution must be positive")

    g = raw.get("graph", {})
    kind = g.get("kind", "hybrid")
    if kind not in ("hybrid", "ba", "ws"):
        raise ConfigError("graph.kind", f"must be one of hybrid, ba, ws; got {kind!r}")
    graph = GraphSpec(
        kind=kind,
        ba_fraction=_num(g, "ba_fraction", lo=0.0, hi=1.0, prefix="graph.", default=0.5),
        m_attach=_num(g, "m_attach", int, lo=1, prefix="graph.", default=3),
        k=_num(g, "k", int, lo=2, prefix="graph.", default=6),
        p_rewire=_num(g, "p_rewire", lo=0.0, hi=1.0, prefix="graph.", default=0.1),
        bridge_edges=_num(g, "bridge_edges", int, lo=0, prefix="graph.", default=50),
    )
    if graph.k % 2:
        raise ConfigError("graph.k", "must be even")

    mf = raw.get("meanfield", {})
    vote = raw.get("vote", {})
    seed = _num(raw, "seed", int, lo=0, default=0)

    return SimConfig(
        fragments=tuple(fragments),
        gamma_forget=gamma_forget,
        num_all=num_all,
        esef=EsefParams(d=d, sigma=sigma, theta_decay=vartheta, m=m),
        weights=weights,
        mutation=mutation,
        init=init,
        graph=graph,
        seed=seed,
        p_abstain=_num(vote, "p_abstain", lo=0.0, hi=1.0, prefix="vote.", default=0.015),
        meanfield_dt=_num(mf, "dt", lo=1e-12, prefix="meanfield.", default=0.01),
        meanfield_i0=_num(mf, "i0", lo=1e-12, hi=1.0 - 1e-12, prefix="meanfield.", default=0.01),
        name=name,
    )


def load_config(path: str | Path, *, env: bool = True) -> SimConfig:
    """Read a TOML config; ``AFFECTSIM_SEED`` (if set and ``env``) overrides ``seed``."""
    path = Path(path)
    try:
        raw = tomli.loads(path.read_text(encoding="utf-8"))
    except tomli.TOMLDecodeError as exc:
        raise ConfigError("<file>", f"not valid TOML: {exc}") from exc
    cfg = from_dict(raw, name=path.stem)
    return apply_env_seed(cfg) if env else cfg


def apply_env_seed(cfg: SimConfig) -> SimConfig:
    val = os.environ.get(SEED_ENV)
    if not val:
        return cfg
    try:
        return cfg.with_seed(int(val))
    except ValueError:
        raise ConfigError(SEED_ENV, f"not an integer: {val!r}") from None


def preset_path(name: str) -> Path:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return Path(str(resources.files("affectsim") / "presets" / f"{name}.toml"))


def load_preset(name: str) -> SimConfig:
    return load_config(preset_path(name), env=False)
