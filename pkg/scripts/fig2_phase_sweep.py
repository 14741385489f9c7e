"""Sensitivity versus the internal phase for HD and ID, balanced (a) and G2^2 = 20 (b)."""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from acmzi import metrology as mt
from acmzi.dataset import Dataset
from acmzi.metrology import Scheme
from acmzi.model import LOSSLESS, InterferometerConfig

from figcommon import parse_into, pyplot, save


@dataclass
class Fig2Config:
    n_c: float = 1000.0
    g1_sq: float = 5.0
    g2_sq_unbalanced: float = 20.0
    phi_min: float = 2.8
    phi_max: float = 3.5
    points: int = 1401
    out: str = "figures"
    plot: bool = True


def panel(cfg: InterferometerConfig, phi: np.ndarray) -> Dataset:
    hd = mt.delta_phi(cfg, LOSSLESS, phi, Scheme.HOMODYNE)
    idd = mt.delta_phi(cfg, LOSSLESS, phi, Scheme.INTENSITY)
    q, s = mt.qcrb(mt.qfi_phase_averaged(cfg)), mt.sql(cfg)
    rows = [(float(p), float(a), float(b), q, s) for p, a, b in zip(phi, hd, idd)]
    return Dataset.from_rows(("phi", "delta_phi_hd", "delta_phi_id", "qcrb", "sql"), rows,
                             metadata={"g1_sq": cfg.g1_gain ** 2, "g2_sq": cfg.g2_gain ** 2})


def main(c: Fig2Config):
    phi = np.linspace(c.phi_min, c.phi_max, c.points)
    base = InterferometerConfig.from_gains(c.n_c, c.g1_sq)
    panels = {"a": base, "b": base.with_g2(math.sqrt(c.g2_sq_unbalanced))}
    data = {k: panel(cfg, phi) for k, cfg in panels.items()}
    for k, ds in data.items():
        save(ds, c.out, f"fig2{k}.csv")
        hd, idd = np.array(ds.data["delta_phi_hd"]), np.array(ds.data["delta_phi_id"])
        print(f"  ({k}) min HD {np.min(hd):.7f}, min ID {np.min(idd):.7f}")
    plt = pyplot() if c.plot else None
    if plt is None:
        return
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, (k, ds) in zip(axes, data.items()):
        for col, lab, st in (("delta_phi_hd", "HD", "-"), ("delta_phi_id", "ID", "-"),
                             ("qcrb", "QCRB", "--"), ("sql", "SQL", ":")):
            ax.plot(ds.data["phi"], ds.data[col], st, label=lab)
        ax.set_yscale("log")
        ax.set_xlabel(r"$\phi$")
        ax.set_title(f"({k})")
    axes[0].set_ylabel(r"$\Delta\phi$")
    axes[0].legend()
    fig.tight_layout()
    path = Path(c.out) / "fig2.png"
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


if __name__ == "__main__":
    main(parse_into(Fig2Config, __doc__))
