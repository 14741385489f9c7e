"""Optimized-gain sensitivity over the external and internal loss planes with SQL0/SQL1 contours.

HD gives the first figure, ID the second; pass --scheme to pick one.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from acmzi import metrology as mt
from acmzi import optimize as op
from acmzi.dataset import Dataset
from acmzi.metrology import Scheme
from acmzi.model import InterferometerConfig

from figcommon import parse_into, pyplot, save


@dataclass
class LossMapConfig:
    n_c: float = 1000.0
    g1_sq: float = 5.0
    scheme: str = "homodyne"
    resolution: int = 101
    workers: int = 1
    out: str = "figures"
    plot: bool = True


def plane_data(cfg, plane, scheme, res, workers):
    g0 = op.loss_map(cfg, plane, res, False, scheme, workers)
    g1 = op.loss_map(cfg, plane, res, True, scheme, workers)
    level = mt.sql(cfg)
    curves = {}
    for tag, g, opt in (("sql0", g0, False), ("sql1", g1, True)):
        ev = op.sensitivity_function(cfg, plane, scheme, opt)
        curves[tag] = op.extract_boundary(g, ev, level).as_array()
    return g0, g1, curves


def main(c: LossMapConfig):
    cfg = InterferometerConfig.from_gains(c.n_c, c.g1_sq)
    scheme = Scheme(c.scheme)
    tag = "fig4" if scheme is Scheme.HOMODYNE else "fig5"
    results = {}
    for plane in op.Plane:
        g0, g1, curves = plane_data(cfg, plane, scheme, c.resolution, c.workers)
        results[plane] = (g1, curves)
        rows = [(float(x), float(y), float(g1.values[j, i]), float(g1.gain_values[j, i]))
                for j, y in enumerate(g1.y_axis) for i, x in enumerate(g1.x_axis)]
        save(Dataset.from_rows((g1.x_name, g1.y_name, "delta_phi", "gain_ratio"), rows),
             c.out, f"{tag}_{plane.value}_grid.csv")
        for name, pts in curves.items():
            save(Dataset.from_rows((g1.x_name, g1.y_name), [tuple(p) for p in pts]),
                 c.out, f"{tag}_{plane.value}_{name}.csv")
        level = mt.sql(cfg)
        print(f"  {plane.value}: cells beating SQL {op.beating_area(g0, level)} balanced, "
              f"{op.beating_area(g1, level)} optimized")
    plt = pyplot() if c.plot else None
    if plt is None:
        return
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
    for ax, (plane, (g1, curves)) in zip(axes, results.items()):
        m = ax.pcolormesh(g1.x_axis, g1.y_axis, np.log10(g1.values), shading="auto")
        fig.colorbar(m, ax=ax, label=r"$\log_{10}\Delta\phi$")
        for name, style in (("sql0", "w-"), ("sql1", "w--")):
            pts = curves[name]
            if len(pts):
                ax.plot(pts[:, 0], pts[:, 1], style, lw=1.5, label=name.upper())
        ax.set_xlabel(g1.x_name)
        ax.set_ylabel(g1.y_name)
        ax.legend(loc="lower left")
    fig.tight_layout()
    path = Path(c.out) / f"{tag}.png"
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


if __name__ == "__main__":
    main(parse_into(LossMapConfig, __doc__))
