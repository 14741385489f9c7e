"""Optimal sensitivity and ID working phase versus the gain ratio G2/G1."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from acmzi import metrology as mt
from acmzi import optimize as op
from acmzi.dataset import Dataset
from acmzi.metrology import Scheme
from acmzi.model import LOSSLESS, InterferometerConfig

from figcommon import parse_into, pyplot, save


@dataclass
class Fig3Config:
    n_c: float = 1000.0
    g1_sq: float = 5.0
    ratio_max: float = 6.0
    step: float = 0.05
    out: str = "figures"
    plot: bool = True


def main(c: Fig3Config):
    cfg = InterferometerConfig.from_gains(c.n_c, c.g1_sq)
    ratios = 1.0 + c.step * np.arange(int(round((c.ratio_max - 1.0) / c.step)) + 1)
    hd = op.gain_sweep(cfg, LOSSLESS, Scheme.HOMODYNE, ratios)
    idd = op.gain_sweep(cfg, LOSSLESS, Scheme.INTENSITY, ratios)
    q, s = mt.qcrb(mt.qfi_phase_averaged(cfg)), mt.sql(cfg)
    rows = [(h.ratio, i.phi_opt, h.delta_phi, i.delta_phi, q, s) for h, i in zip(hd, idd)]
    ds = Dataset.from_rows(("ratio", "phi_opt_id", "delta_phi_hd", "delta_phi_id", "qcrb", "sql"), rows)
    save(ds, c.out, "fig3.csv")
    plt = pyplot() if c.plot else None
    if plt is None:
        return
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(ratios, ds.data["delta_phi_hd"], label="HD")
    ax1.plot(ratios, ds.data["delta_phi_id"], label="ID")
    ax1.axhline(q, ls="--", c="k", label="QCRB")
    ax1.set_xlabel(r"$G_2/G_1$")
    ax1.set_ylabel(r"$\Delta\phi_{opt}$")
    ax1.legend()
    ax2.plot(ratios, ds.data["phi_opt_id"])
    ax2.set_xlabel(r"$G_2/G_1$")
    ax2.set_ylabel(r"$\phi_{opt}$ (ID)")
    fig.tight_layout()
    path = Path(c.out) / "fig3.png"
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


if __name__ == "__main__":
    main(parse_into(Fig3Config, __doc__))
