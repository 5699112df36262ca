"""Parameter sweeps over one or two axes, with CSV/JSON output.

Axis values and the base configuration are kept in configuration-document
units (rates in 1e6 s^-1) so spec files read like the figure axes.  The
observable values themselves are SI: transmissions and efficiencies are
dimensionless, ``tau_g`` is in seconds, eigenfrequencies and shifts are in
s^-1 (eigenfrequencies relative to ``omega_c``).
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .effective import lit_shift_report
from .errors import ConfigError, InvalidSpec, OmitlabError
from .omit import group_delay, probe_transmission
from .optics import optical_transmission, supermode_frequencies
from .params import (
    RATE_KEYS,
    SI_KEYS,
    SystemConfig,
    config_from_mapping,
    config_to_mapping,
    parse_rate,
    parse_value,
)
from .sideband import sideband_efficiency

OBSERVABLES = ("optical_T", "T_P", "tau_g", "eta", "eig_real", "eig_imag", "shift")
EIG_COMPONENTS = ("plus", "minus")


@dataclass(frozen=True)
class Axis:
    path: str
    start: float
    stop: float
    count: int
    values: tuple[float, ...] | None = None

    def grid(self) -> list[float]:
        if self.values is not None:
            return list(self.values)
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"path": self.path, "start": self.start, "stop": self.stop, "count": self.count}
        if self.values is not None:
            out["values"] = list(self.values)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Axis":
        if not isinstance(d, dict) or "path" not in d:
            raise InvalidSpec(f"axis must be a mapping with a 'path', got {d!r}")
        try:
            if "values" in d:
                values = tuple(float(v) for v in d["values"])
                if not values:
                    raise InvalidSpec(f"axis {d['path']!r}: empty values list")
                return cls(d["path"], values[0], values[-1], len(values), values)
            return cls(d["path"], float(d["start"]), float(d["stop"]), int(d["count"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"axis {d.get('path')!r}: {exc}") from exc


@dataclass(frozen=True)
class SweepSpec:
    observable: str
    axis1: Axis
    axis2: Axis | None = None
    base: dict = field(default_factory=dict)
    Delta_P: float = 0.0

    def validate(self) -> None:
        if self.observable not in OBSERVABLES:
            raise InvalidSpec(f"unknown observable {self.observable!r}; choose from {OBSERVABLES}")
        axes = [self.axis1] + ([self.axis2] if self.axis2 is not None else [])
        for ax in axes:
            if ax.path != "Delta_P" and ax.path not in RATE_KEYS + SI_KEYS:
                raise InvalidSpec(f"axis path {ax.path!r} is not a config field or Delta_P")
            if ax.count < 2:
                raise InvalidSpec(f"axis {ax.path!r}: count must be >= 2")
            if not ax.start < ax.stop:
                raise InvalidSpec(f"axis {ax.path!r}: start must be < stop")
            if ax.values is not None and any(b <= a for a, b in zip(ax.values, ax.values[1:])):
                raise InvalidSpec(f"axis {ax.path!r}: values must be strictly increasing")
        if self.axis2 is not None and self.axis2.path == self.axis1.path:
            raise InvalidSpec("the two axes must sweep different parameters")
        try:
            self.base_config()
        except ConfigError as exc:
            raise InvalidSpec(f"base config: {exc}") from exc

    def base_config(self) -> SystemConfig:
        return config_from_mapping(self.base)

    def components(self) -> tuple[str, ...]:
        return EIG_COMPONENTS if self.observable.startswith("eig_") else ("value",)

    def to_dict(self) -> dict:
        return {
            "observable": self.observable,
            "axis1": self.axis1.to_dict(),
            "axis2": None if self.axis2 is None else self.axis2.to_dict(),
            "base": dict(self.base),
            "Delta_P": self.Delta_P,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        if not isinstance(d, dict):
            raise InvalidSpec("sweep spec must be a mapping")
        unknown = set(d) - {"observable", "axis1", "axis2", "base", "Delta_P"}
        if unknown:
            raise InvalidSpec(f"unknown sweep spec keys {sorted(unknown)}")
        if "observable" not in d or "axis1" not in d:
            raise InvalidSpec("sweep spec needs 'observable' and 'axis1'")
        axis2 = d.get("axis2")
        base = d.get("base") or {}
        if not isinstance(base, dict):
            raise InvalidSpec("'base' must be a mapping of config values")
        try:
            delta = float(d.get("Delta_P", 0.0))
        except (TypeError, ValueError) as exc:
            raise InvalidSpec(f"Delta_P: {exc}") from exc
        spec = cls(
            observable=d["observable"],
            axis1=Axis.from_dict(d["axis1"]),
            axis2=None if axis2 is None else Axis.from_dict(axis2),
            base=base,
            Delta_P=delta,
        )
        spec.validate()
        return spec


@dataclass(eq=False)
class SweepResult:
    spec: SweepSpec
    grids: dict[str, list[float]]
    errors: list[dict]
    provenance: dict

    @property
    def shape(self) -> tuple[int, int]:
        return self.spec.axis1.count, (1 if self.spec.axis2 is None else self.spec.axis2.count)

    def array(self, component: str = "value") -> np.ndarray:
        return np.asarray(self.grids[component], dtype=float).reshape(self.shape)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "grids": {k: [None if math.isnan(v) else v for v in vals] for k, vals in self.grids.items()},
            "errors": list(self.errors),
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepResult":
        grids = {k: [math.nan if v is None else float(v) for v in vals] for k, vals in d["grids"].items()}
        return cls(SweepSpec.from_dict(d["spec"]), grids, list(d["errors"]), dict(d["provenance"]))

    def __eq__(self, other):
        if not isinstance(other, SweepResult):
            return NotImplemented
        return json.dumps(self.to_dict(), sort_keys=True) == json.dumps(other.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# evaluation


def _cell_config(spec: SweepSpec, base: SystemConfig, assignments: dict[str, float]):
    delta = assignments.pop("Delta_P", spec.Delta_P)
    if assignments:
        parsed = {k: parse_value(k, v) for k, v in assignments.items()}
        cfg = base.replace(**parsed)
    else:
        cfg = base
    return cfg, parse_rate("Delta_P", delta)


def evaluate_point(observable: str, cfg: SystemConfig, Delta_P: float) -> tuple[float, ...]:
    """Observable value(s) at one configuration and SI probe detuning."""
    if observable == "optical_T":
        return (optical_transmission(cfg, Delta_P, Delta_P)[0],)
    if observable == "T_P":
        return (probe_transmission(cfg, Delta_P)[1],)
    if observable == "tau_g":
        return (group_delay(cfg, Delta_P),)
    if observable == "eta":
        return (sideband_efficiency(cfg, Delta_P).eta,)
    if observable in ("eig_real", "eig_imag"):
        # raw complex pair; branch tracking and the real/imag split happen after assembly
        modes = supermode_frequencies(cfg, 0.0, 0.0)
        return (modes.omega_plus, modes.omega_minus)
    if observable == "shift":
        return (lit_shift_report(cfg).shift,)
    raise InvalidSpec(f"unknown observable {observable!r}")


def _evaluate_chunk(args):
    spec_dict, cells = args
    spec = SweepSpec.from_dict(spec_dict)
    base = spec.base_config()
    n_comp = 2 if spec.observable.startswith("eig_") else 1
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for index, assignments in cells:
            try:
                cfg, delta = _cell_config(spec, base, dict(assignments))
                values = evaluate_point(spec.observable, cfg, delta)
                out.append((index, values, None))
            except (OmitlabError, ArithmeticError, ValueError) as exc:
                nan = (complex("nan+nanj"),) * n_comp if n_comp == 2 else (math.nan,)
                out.append((index, nan, f"{type(exc).__name__}: {exc}"))
    return out


def _cells(spec: SweepSpec):
    g1 = spec.axis1.grid()
    g2 = spec.axis2.grid() if spec.axis2 is not None else [None]
    cells = []
    for i, v1 in enumerate(g1):
        for j, v2 in enumerate(g2):
            assignments = {spec.axis1.path: v1}
            if spec.axis2 is not None:
                assignments[spec.axis2.path] = v2
            cells.append((i * len(g2) + j, assignments))
    return cells


def _track(plus: np.ndarray, minus: np.ndarray):
    """Nearest-neighbour branch assignment along the first axis."""
    plus, minus = plus.copy(), minus.copy()
    for col in range(plus.shape[1]):
        for i in range(1, plus.shape[0]):
            a, b = plus[i, col], minus[i, col]
            pa, pb = plus[i - 1, col], minus[i - 1, col]
            if np.isnan(a) or np.isnan(pa):
                continue
            if abs(b - pa) + abs(a - pb) < abs(a - pa) + abs(b - pb):
                plus[i, col], minus[i, col] = b, a
    return plus, minus


def config_hash(spec: SweepSpec) -> str:
    cfg = spec.base_config()
    payload = {"spec": spec.to_dict(), "config": config_to_mapping(cfg)}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Evaluate the observable on every grid cell.

    Cells that fail are stored as NaN and listed in ``errors``; the sweep
    itself only raises :class:`InvalidSpec`.  Results do not depend on
    ``workers``.
    """
    spec.validate()
    cells = _cells(spec)
    spec_dict = spec.to_dict()
    if workers > 1 and len(cells) > 1:
        size = max(1, math.ceil(len(cells) / (workers * 4)))
        chunks = [(spec_dict, cells[k : k + size]) for k in range(0, len(cells), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_evaluate_chunk, chunks))
        results = [r for part in parts for r in part]
    else:
        results = _evaluate_chunk((spec_dict, cells))
    results.sort(key=lambda r: r[0])

    n = len(cells)
    components = spec.components()
    errors = []
    g1 = spec.axis1.grid()
    g2 = spec.axis2.grid() if spec.axis2 is not None else [None]
    if spec.observable.startswith("eig_"):
        raw = np.array([r[1] for r in results], dtype=complex).reshape(len(g1), len(g2), 2)
        plus, minus = _track(raw[..., 0], raw[..., 1])
        part = np.real if spec.observable == "eig_real" else np.imag
        grids = {"plus": [float(v) for v in part(plus).ravel()], "minus": [float(v) for v in part(minus).ravel()]}
    else:
        grids = {"value": [float(r[1][0]) for r in results]}
    for index, _, err in results:
        if err is not None:
            i, j = divmod(index, len(g2))
            errors.append({"index": index, "axis1": g1[i], "axis2": g2[j], "error": err})
    assert all(len(v) == n for v in grids.values()) and tuple(grids) == components
    provenance = {
        "config_hash": config_hash(spec),
        "code_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    return SweepResult(spec=spec, grids=grids, errors=errors, provenance=provenance)


# ---------------------------------------------------------------------------
# output


def _fmt(v: float) -> str:
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def emit(result: SweepResult, fmt: str = "csv") -> str:
    """Render a sweep as CSV (data only) or JSON (spec, grids, errors, provenance)."""
    if fmt == "json":
        return json.dumps(result.to_dict(), indent=1, sort_keys=True) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    two_d = result.spec.axis2 is not None
    comps = list(result.grids)
    w.writerow((["axis1", "axis2"] if two_d else ["axis1"]) + comps)
    g1 = result.spec.axis1.grid()
    g2 = result.spec.axis2.grid() if two_d else [None]
    for i, v1 in enumerate(g1):
        for j, v2 in enumerate(g2):
            k = i * len(g2) + j
            row = [_fmt(v1)] + ([_fmt(v2)] if two_d else [])
            row += [_fmt(result.grids[c][k]) for c in comps]
            w.writerow(row)
    return buf.getvalue()


def emit_errors(result: SweepResult) -> str:
    """Error table for the NaN cells of a CSV emission."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "axis1", "axis2", "error"])
    for e in result.errors:
        w.writerow([e["index"], _fmt(e["axis1"]), "" if e["axis2"] is None else _fmt(e["axis2"]), e["error"]])
    return buf.getvalue()


def parse_json(text: str) -> SweepResult:
    return SweepResult.from_dict(json.loads(text))
