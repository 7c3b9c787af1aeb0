"""Post-processing and export of simulation traces.

All writers are deterministic: equal inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .network import WeightedGraph


@dataclass(frozen=True)
class BandSpec:
    """Cut points ``e_0 < e_1 < ... < e_K`` giving bands ``[e_k, e_k+1)``.

    The last band is closed so that ETV ``m`` is counted.
    """

    edges: tuple[int, ...]

    def __post_init__(self):
        edges = tuple(int(e) for e in self.edges)
        if len(edges) < 2:
            raise ValueError("need at least two band edges")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("band edges must be strictly ascending")
        object.__setattr__(self, "edges", edges)

    def labels(self) -> list[str]:
        return [f"b{a}_{b}" for a, b in zip(self.edges, self.edges[1:])]

    def validate(self, m: int) -> None:
        if self.edges[0] != 0 or self.edges[-1] != m:
            raise ValueError(f"bands must cover [0, {m}], got edges {self.edges}")


# bands of the multi-fragment stack plot
COARSE_BANDS = BandSpec((0, 7, 14, 18, 25, 32))
# finer split around the neutral point
FINE_BANDS = BandSpec((0, 4, 8, 13, 16, 21, 26, 32))


def band_counts(etvs: np.ndarray, bands: BandSpec, m: int) -> np.ndarray:
    bands.validate(m)
    etvs = np.asarray(etvs)
    if etvs.size and (etvs.min() < 0 or etvs.max() > m):
        raise ValueError(f"ETVs outside [0, {m}]")
    idx = np.searchsorted(np.asarray(bands.edges[1:-1]), etvs, side="right")
    return np.bincount(idx, minlength=len(bands.edges) - 1)


def etv_bands(trace, bands: BandSpec = COARSE_BANDS) -> np.ndarray:
    """Per-round node counts in each band, shape ``(T + 1, n_bands)``."""
    return np.stack([band_counts(r.etvs, bands, trace.m) for r in trace.records])


@dataclass(frozen=True)
class VoteTally:
    votes_a: int
    votes_b: int
    abstained: int

    @property
    def total(self) -> int:
        return self.votes_a + self.votes_b + self.abstained

    @property
    def abstain_fraction(self) -> float:
        return self.abstained / self.total


def simulate_vote(etvs: Sequence[int] | np.ndarray, p_abstain: float, rng: np.random.Generator,
                  m: int = 32) -> VoteTally:
    """Two-candidate ballot from final ETVs (defined for ``m == 32`` only).

    With ``e = ETV - 16``: ``e`` in [1, 16] votes A, ``e`` in [-16, -2] votes B;
    ``e == 0`` votes A and ``e == -1`` votes B, each abstaining instead with
    probability ``p_abstain``.
    """
    if m != 32:
        raise ValueError("the ballot mapping is only defined for m = 32")
    if not 0.0 <= p_abstain <= 1.0:
        raise ValueError("p_abstain must lie in [0, 1]")
    e = np.asarray(etvs, dtype=np.int64) - 16
    if e.size and (e.min() < -16 or e.max() > 16):
        raise ValueError("ETVs outside [0, 32]")
    abstain = rng.random(e.size) < p_abstain
    undecided = (e == 0) | (e == -1)
    a = int(np.count_nonzero(e >= 1) + np.count_nonzero((e == 0) & ~abstain))
    b = int(np.count_nonzero(e <= -2) + np.count_nonzero((e == -1) & ~abstain))
    return VoteTally(a, b, int(np.count_nonzero(undecided & abstain)))


_RED, _WHITE, _GRAY = (0x8B, 0x00, 0x00), (0xFF, 0xFF, 0xFF), (0x40, 0x40, 0x40)


def _lerp(c0, c1, x):
    return tuple(int(round(a + (b - a) * x)) for a, b in zip(c0, c1))


def etv_color(e: int, m: int = 32) -> str:
    """Hex colour: dark red at 0, white at m/2, dark gray at m."""
    if not 0 <= e <= m:
        raise ValueError(f"ETV outside [0, {m}]")
    half = m / 2
    rgb = _lerp(_RED, _WHITE, e / half) if e <= half else _lerp(_WHITE, _GRAY, (e - half) / half)
    return "#{:02X}{:02X}{:02X}".format(*rgb)


def export_colored_graph(graph: WeightedGraph, etvs, path: str | Path, format: str = "dot", m: int = 32) -> Path:
    etvs = np.asarray(etvs, dtype=np.int64)
    if len(etvs) != graph.n:
        raise ValueError("one ETV per node required")
    colors = [etv_color(int(e), m) for e in etvs]
    if format == "dot":
        text = _dot(graph, etvs, colors)
    elif format == "graphml":
        text = _graphml(graph, etvs, colors)
    else:
        raise ValueError(f"unknown graph format {format!r}")
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path


def _dot(graph, etvs, colors) -> str:
    lines = ["graph emotions {", "  node [style=filled, shape=circle];"]
    for v, (e, c) in enumerate(zip(etvs.tolist(), colors)):
        lines.append(f'  {v} [etv={e}, fillcolor="{c}", color="{c}"];')
    for u, v, w in graph.edges():
        lines.append(f"  {u} -- {v} [weight={w!r}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _graphml(graph, etvs, colors) -> str:
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="etv" for="node" attr.name="etv" attr.type="int"/>',
        '  <key id="color" for="node" attr.name="color" attr.type="string"/>',
        '  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>',
        '  <graph id="G" edgedefault="undirected">',
    ]
    for v, (e, c) in enumerate(zip(etvs.tolist(), colors)):
        lines.append(f'    <node id="n{v}"><data key="etv">{e}</data><data key="color">{c}</data></node>')
    for k, (u, v, w) in enumerate(graph.edges()):
        lines.append(f'    <edge id="e{k}" source="n{u}" target="n{v}"><data key="weight">{w!r}</data></edge>')
    lines += ["  </graph>", "</graphml>"]
    return "\n".join(lines) + "\n"


TRACE_COLUMNS = ("t", "fragment", "t_local", "S", "I", "phi")


def _trace_rows(trace) -> list[dict]:
    # fragment is written 1-based to match the info_1 .. info_n numbering
    return [
        {"t": r.t, "fragment": r.fragment + 1, "t_local": r.t_local, "S": r.S, "I": r.I,
         "phi": f"{r.phi:.6f}"}
        for r in trace.records
    ]


def write_timeseries(trace, path: str | Path, format: str = "csv") -> Path:
    """Per-round ``t,fragment,t_local,S,I,phi`` as CSV or JSON (phi to 6 decimals)."""
    rows = _trace_rows(trace)
    path = Path(path)
    if format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=TRACE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        path.write_text(buf.getvalue(), encoding="utf-8")
    elif format == "json":
        records = [{**r, "phi": float(r["phi"])} for r in rows]
        path.write_text(json.dumps({"columns": list(TRACE_COLUMNS), "records": records}, indent=1) + "\n",
                        encoding="utf-8")
    else:
        raise ValueError(f"unknown timeseries format {format!r}")
    return path


def read_timeseries(path: str | Path) -> list[dict]:
    path = Path(path)
    if path.suffix == ".json":
        return json.loads(path.read_text(encoding="utf-8"))["records"]
    with path.open(newline="", encoding="utf-8") as fh:
        return [
            {k: (float(v) if k == "phi" else int(v)) for k, v in row.items()}
            for row in csv.DictReader(fh)
        ]


def write_csv(path: str | Path, header: Sequence[str], rows) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path = Path(path)
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def write_bands(trace, path: str | Path, bands: BandSpec = COARSE_BANDS) -> Path:
    counts = etv_bands(trace, bands)
    return write_csv(path, ["t", *bands.labels()],
                     ([r.t, *row.tolist()] for r, row in zip(trace.records, counts)))


def write_final_etvs(trace, path: str | Path) -> Path:
    return write_csv(path, ["node", "etv"], enumerate(trace.final_etvs.tolist()))


def write_beta(trace, path: str | Path) -> Path:
    """Population-mean spread rate used in each round (``T`` rows)."""
    return write_csv(path, ["t", "beta_mean"],
                     ([r.t - 1, f"{r.beta_mean:.12f}"] for r in trace.records[1:]))


def read_column(path: str | Path, column: str) -> np.ndarray:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise KeyError(f"{path} has no column {column!r}")
        return np.array([float(row[column]) for row in reader])
