"""Command-line front end: ``acmzi {sensitivity,gain-sweep,loss-map,verify}``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key=value`` lines, then command-line flags, later sources winning.

Exit codes: 0 ok, 1 usage or config error, 2 verification failure,
3 every evaluated cell divergent.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from . import metrology as mt
from . import optimize as op
from . import verify as vf
from .dataset import Dataset
from .errors import (AcmziError, NonpositiveFisherError, UnsupportedPhaseConfigError,
                     ZeroPhotonsError)
from .metrology import Scheme
from .model import InterferometerConfig, LossConfig

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_DIVERGENT = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    # device
    n_c: float = 1000.0
    g1_sq: float = 5.0
    g2_sq: float = 5.0
    theta1: float = 0.0
    theta2: float = math.pi
    bs_t: float = 0.5
    bs_r: float = 0.5
    eta_a: float = 1.0
    eta_b: float = 1.0
    eta_c: float = 1.0
    eta_d: float = 1.0
    # sensitivity
    phi_min: float = 2.8
    phi_max: float = 3.5
    phi_points: int = 701
    # gain-sweep
    ratio_min: float = 1.0
    ratio_max: float = 6.0
    ratio_step: float = 0.05
    # loss-map
    plane: str = "internal"
    scheme: str = "homodyne"
    resolution: int = 101
    g2_sq_max: float = op.G2_SQ_MAX
    workers: int = 1
    sql_policy: str = "photons_inside"
    # verify
    seed: int = 0
    n_points: int = 200
    tolerance_scale: float = 1.0
    # output
    output: str = ""
    format: str = "csv"
    emit_plot: bool = False

    def interferometer(self) -> InterferometerConfig:
        if abs(self.bs_t + self.bs_r - 1.0) > 1e-12:
            raise UsageError(f"bs_t + bs_r must equal 1, got {self.bs_t + self.bs_r}")
        return InterferometerConfig.from_gains(self.n_c, self.g1_sq, self.g2_sq, self.theta1,
                                               self.theta2, self.bs_t)

    def loss(self) -> LossConfig:
        return LossConfig(self.eta_a, self.eta_b, self.eta_c, self.eta_d)


FIELD_TYPES = {f.name: type(f.default) for f in fields(RunConfig)}


def _coerce(key: str, text: str):
    kind = FIELD_TYPES[key]
    try:
        if kind is bool:
            low = text.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind is int:
            return int(text)
        if kind is float:
            v = float(text)
            if not math.isfinite(v):
                raise ValueError(text)
            return v
        return text.strip()
    except ValueError:
        raise UsageError(f"bad value for {key}: {text!r}") from None


def parse_config_file(path: str | Path) -> dict:
    """Flat ``key=value`` file; ``#`` starts a comment, unknown keys are errors."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from None
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip()
        if not sep:
            raise UsageError(f"{path}:{n}: expected key=value")
        if key not in FIELD_TYPES:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        out[key] = _coerce(key, val)
    return out


def resolve_config(file_values: dict, flag_values: dict) -> RunConfig:
    merged = {**file_values, **{k: v for k, v in flag_values.items() if v is not None}}
    # g2 follows g1 unless set explicitly
    if "g2_sq" not in merged and "g1_sq" in merged:
        merged["g2_sq"] = merged["g1_sq"]
    if "bs_r" not in merged and "bs_t" in merged:
        merged["bs_r"] = 1.0 - merged["bs_t"]
    return replace(RunConfig(), **merged)


# ---------------------------------------------------------------------------
# commands

def _metadata(command: str, run: RunConfig) -> dict:
    meta = {"command": command, "tool": "acmzi", "version": __version__,
            "timestamp": _timestamp()}
    meta.update({f"config.{k}": v for k, v in asdict(run).items()})
    return meta


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = time.gmtime(int(epoch)) if epoch else time.gmtime()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", t)


def _delta_phi_any(cfg, loss, phi, scheme):
    """Closed form when the PA phases allow it, engine error propagation otherwise."""
    try:
        return mt.delta_phi(cfg, loss, phi, scheme)
    except UnsupportedPhaseConfigError:
        out = []
        for p in np.atleast_1d(phi):
            try:
                out.append(mt.engine_sensitivity(cfg, loss, p, scheme).delta_phi)
            except AcmziError:
                out.append(math.inf)
        return np.array(out)


def _bounds(cfg, loss, policy):
    """(QCRB, SQL); a bound that does not exist is reported as divergent."""
    try:
        q = mt.qcrb(mt.qfi_phase_averaged(cfg))
    except NonpositiveFisherError:
        q = math.inf
    try:
        s = mt.sql(cfg, loss, policy)
    except ZeroPhotonsError:
        s = math.inf
    return q, s


def cmd_sensitivity(run: RunConfig) -> Dataset:
    if not (run.phi_max > run.phi_min) or run.phi_points < 2:
        raise UsageError("empty phi range: need phi_max > phi_min and phi_points >= 2")
    cfg, loss = run.interferometer(), run.loss()
    phi = np.linspace(run.phi_min, run.phi_max, run.phi_points)
    hd = _delta_phi_any(cfg, loss, phi, Scheme.HOMODYNE)
    idd = _delta_phi_any(cfg, loss, phi, Scheme.INTENSITY)
    q, s = _bounds(cfg, loss, run.sql_policy)
    rows = [(float(p), float(a), float(b), q, s) for p, a, b in zip(phi, hd, idd)]
    ds = Dataset.from_rows(("phi", "delta_phi_hd", "delta_phi_id", "qcrb", "sql"), rows,
                           units={"phi": "rad", "delta_phi_hd": "rad", "delta_phi_id": "rad",
                                  "qcrb": "rad", "sql": "rad"},
                           metadata=_metadata("sensitivity", run))
    return ds


def _ratios(run: RunConfig) -> np.ndarray:
    if run.ratio_min < 1:
        raise UsageError(f"gain ratio must be >= 1, got ratio_min={run.ratio_min}")
    if run.ratio_step <= 0 or run.ratio_max < run.ratio_min:
        raise UsageError("need ratio_step > 0 and ratio_max >= ratio_min")
    n = int(math.floor((run.ratio_max - run.ratio_min) / run.ratio_step + 1e-9)) + 1
    return run.ratio_min + run.ratio_step * np.arange(n)


def cmd_gain_sweep(run: RunConfig) -> Dataset:
    cfg, loss = run.interferometer(), run.loss()
    ratios = _ratios(run)
    hd = op.gain_sweep(cfg, loss, Scheme.HOMODYNE, ratios)
    idd = op.gain_sweep(cfg, loss, Scheme.INTENSITY, ratios)
    q, s = _bounds(cfg, loss, run.sql_policy)
    rows = [(h.ratio, i.phi_opt, h.delta_phi, i.delta_phi, q, s) for h, i in zip(hd, idd)]
    return Dataset.from_rows(("ratio", "phi_opt_id", "delta_phi_hd", "delta_phi_id", "qcrb", "sql"),
                             rows, units={"ratio": "1", "phi_opt_id": "rad", "delta_phi_hd": "rad",
                                          "delta_phi_id": "rad", "qcrb": "rad", "sql": "rad"},
                             metadata=_metadata("gain-sweep", run))


def cmd_loss_map(run: RunConfig) -> dict[str, Dataset]:
    """Grid, SQL0/SQL1 boundaries and the optimal-gain contour data.

    SQL0 is the sensitivity = SQL contour with balanced gains, SQL1 the same
    contour with PA2's gain optimized in every cell.
    """
    if run.resolution < 16:
        raise UsageError(f"resolution must be >= 16, got {run.resolution}")
    try:
        plane, scheme = op.Plane(run.plane), Scheme(run.scheme)
    except ValueError as e:
        raise UsageError(str(e)) from None
    cfg = run.interferometer().balanced()
    g2_range = (1.0, math.sqrt(run.g2_sq_max))
    g0 = op.loss_map(cfg, plane, run.resolution, False, scheme, workers=run.workers)
    g1 = op.loss_map(cfg, plane, run.resolution, True, scheme, workers=run.workers,
                     g2_range=g2_range)
    level = mt.sql(cfg, None, run.sql_policy)
    meta = _metadata("loss-map", run)
    meta["sql_value"] = level
    xn, yn = g0.x_name, g0.y_name

    rows = []
    for j, y in enumerate(g0.y_axis):
        for i, x in enumerate(g0.x_axis):
            rows.append((float(x), float(y), float(g0.values[j, i]), float(g1.values[j, i]),
                         float(g1.gain_values[j, i]), float(g1.phi_values[j, i])))
    grid = Dataset.from_rows((xn, yn, "delta_phi_balanced", "delta_phi_optimized",
                              "gain_ratio_opt", "phi_opt"), rows,
                             units={xn: "1", yn: "1", "delta_phi_balanced": "rad",
                                    "delta_phi_optimized": "rad", "gain_ratio_opt": "1",
                                    "phi_opt": "rad"}, metadata=meta)
    out = {"grid": grid}
    for tag, g, opt in (("sql0", g0, False), ("sql1", g1, True)):
        ev = op.sensitivity_function(cfg, plane, scheme, opt, g2_range)
        curve = op.extract_boundary(g, ev, level)
        out[tag] = Dataset.from_rows((xn, yn), [tuple(p) for p in curve.points],
                                     units={xn: "1", yn: "1"},
                                     metadata={**meta, "curve": tag.upper()})
    out["gain"] = Dataset.from_rows((xn, yn, "gain_ratio_opt"),
                                    [(r[0], r[1], r[4]) for r in rows],
                                    units={xn: "1", yn: "1", "gain_ratio_opt": "1"},
                                    metadata=meta)
    return out


def cmd_verify(run: RunConfig) -> Dataset:
    if run.n_points < 1 or run.tolerance_scale < 0:
        raise UsageError("need n_points >= 1 and tolerance_scale >= 0")
    rows = [(r.name, r.value, r.tolerance, int(r.passed))
            for r in vf.run_all(run.n_points, run.seed, run.tolerance_scale)]
    return Dataset.from_rows(("check", "residual", "tolerance", "passed"), rows,
                             metadata=_metadata("verify", run))


# ---------------------------------------------------------------------------
# output

PLOT_TEMPLATES = {
    "sensitivity": '''
cols = load({main!r})
plt.plot(cols["phi"], cols["delta_phi_hd"], label="HD")
plt.plot(cols["phi"], cols["delta_phi_id"], label="ID")
plt.plot(cols["phi"], cols["qcrb"], "--", label="QCRB")
plt.plot(cols["phi"], cols["sql"], ":", label="SQL")
plt.yscale("log")
plt.xlabel("phi")
plt.ylabel("delta phi")
''',
    "gain-sweep": '''
cols = load({main!r})
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.plot(cols["ratio"], cols["delta_phi_hd"], label="HD")
ax1.plot(cols["ratio"], cols["delta_phi_id"], label="ID")
ax1.plot(cols["ratio"], cols["qcrb"], "--", label="QCRB")
ax1.set_xlabel("G2/G1")
ax1.legend()
ax2.plot(cols["ratio"], cols["phi_opt_id"])
ax2.set_xlabel("G2/G1")
ax2.set_ylabel("phi_opt (ID)")
''',
    "loss-map": '''
cols = load({main!r})
names = list(cols)
x, y = np.unique(cols[names[0]]), np.unique(cols[names[1]])
z = cols["delta_phi_optimized"].reshape(y.size, x.size)
plt.pcolormesh(x, y, np.log10(z), shading="auto")
plt.colorbar(label="log10 delta phi")
for path, style in (({sql0!r}, "-"), ({sql1!r}, "--")):
    b = load(path)
    plt.plot(b[names[0]], b[names[1]], "w" + style, lw=1.5)
plt.xlabel(names[0])
plt.ylabel(names[1])
''',
}

PLOT_HEADER = '''import numpy as np
import matplotlib.pyplot as plt


def load(path):
    with open(path) as fh:
        lines = [l for l in fh if not l.startswith("#")]
    header = lines[0].strip().split(",")
    rows = [l.rstrip("\\n").split(",") for l in lines[1:] if l.strip()]
    return {h: np.array([float(r[k]) if r[k] else np.nan for r in rows])
            for k, h in enumerate(header)}

'''


def _paths(run: RunConfig, command: str) -> dict[str, Path] | None:
    if not run.output:
        if command == "loss-map":
            base = Path(f"loss_map.{run.format}")
        else:
            return None
    else:
        base = Path(run.output)
    stem, suffix = base.with_suffix(""), base.suffix or f".{run.format}"
    return {"main": base, "sql0": Path(f"{stem}_sql0{suffix}"),
            "sql1": Path(f"{stem}_sql1{suffix}"), "gain": Path(f"{stem}_gain{suffix}"),
            "plot": Path(f"{stem}_plot.py")}


def write_outputs(command: str, run: RunConfig, result, stdout=sys.stdout):
    sets = result if isinstance(result, dict) else {"grid": result}
    paths = _paths(run, command)
    if paths is None:
        stdout.write(sets["grid"].render(run.format))
    else:
        for key, ds in sets.items():
            target = paths["main" if key == "grid" else key]
            target.write_text(ds.render(run.format))
    if run.emit_plot:
        if paths is None or run.format != "csv":
            raise UsageError("emit_plot needs a csv output path")
        if command in PLOT_TEMPLATES:
            body = PLOT_TEMPLATES[command].format(**{k: str(v) for k, v in paths.items()})
            tail = "plt.legend()\n" if command == "sensitivity" else ""
            paths["plot"].write_text(PLOT_HEADER + body + tail + "plt.show()\n")


# ---------------------------------------------------------------------------
# argument parsing

COMMANDS = {
    "sensitivity": (cmd_sensitivity, ("phi_min", "phi_max", "phi_points", "sql_policy")),
    "gain-sweep": (cmd_gain_sweep, ("ratio_min", "ratio_max", "ratio_step", "sql_policy")),
    "loss-map": (cmd_loss_map, ("plane", "scheme", "resolution", "g2_sq_max", "workers",
                                "sql_policy")),
    "verify": (cmd_verify, ("seed", "n_points", "tolerance_scale")),
}
DEVICE_KEYS = ("n_c", "g1_sq", "g2_sq", "theta1", "theta2", "bs_t", "bs_r",
               "eta_a", "eta_b", "eta_c", "eta_d")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_flag(p, key):
    kind = FIELD_TYPES[key]
    flag = "--" + key.replace("_", "-")
    if kind is bool:
        p.add_argument(flag, dest=key, action="store_const", const=True, default=None)
    else:
        p.add_argument(flag, dest=key, type=str, default=None,
                       help=f"default {getattr(RunConfig(), key)!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="acmzi", description="ACMZI phase-sensitivity simulator")
    p.add_argument("--version", action="version", version=f"acmzi {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, extra) in COMMANDS.items():
        s = sub.add_parser(name)
        s.add_argument("--config", default=None, help="key=value config file")
        for key in DEVICE_KEYS + extra + ("output", "format", "emit_plot"):
            _add_flag(s, key)
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        flags = {k: v for k, v in vars(args).items() if k in FIELD_TYPES and v is not None}
        flags = {k: (v if isinstance(v, bool) else _coerce(k, v)) for k, v in flags.items()}
        file_values = parse_config_file(args.config) if args.config else {}
        run = resolve_config(file_values, flags)
        if run.format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {run.format!r}")
        func = COMMANDS[args.command][0]
        result = func(run)
        write_outputs(args.command, run, result, stdout)
    except UsageError as e:
        print(f"acmzi: error: {e}", file=stderr)
        return EXIT_USAGE
    except (AcmziError, ValueError) as e:
        print(f"acmzi: error: {e}", file=stderr)
        return EXIT_USAGE
    except SystemExit as e:          # --help / --version
        return int(e.code or 0)

    if args.command == "verify":
        failed = [r for r in zip(result.data["check"], result.data["passed"]) if not r[1]]
        for name, _ in failed:
            print(f"acmzi: verify: {name} above tolerance", file=stderr)
        return EXIT_VERIFY if failed else EXIT_OK
    sets = result if isinstance(result, dict) else {"grid": result}
    grid = sets["grid"]
    value_cols = [c for c in grid.columns if c.startswith("delta_phi")]
    if value_cols and grid.all_divergent(value_cols):
        print("acmzi: every evaluated point is divergent", file=stderr)
        return EXIT_DIVERGENT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
