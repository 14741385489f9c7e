"""Helpers shared by the figure scripts: output directory, CSV writing, optional plotting."""

import argparse
import dataclasses
from pathlib import Path

from acmzi.dataset import Dataset


def parse_into(cfg_cls, description):
    """Expose every dataclass field of ``cfg_cls`` as a --flag."""
    p = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cfg_cls):
        kind = type(f.default)
        if kind is bool:
            p.add_argument("--" + f.name.replace("_", "-"), dest=f.name,
                           action=argparse.BooleanOptionalAction, default=f.default)
        else:
            p.add_argument("--" + f.name.replace("_", "-"), dest=f.name, type=kind, default=f.default)
    return cfg_cls(**vars(p.parse_args()))


def save(ds: Dataset, out_dir: str, name: str) -> Path:
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(ds.to_csv())
    print(f"wrote {path}")
    return path


def pyplot():
    """matplotlib.pyplot with a file backend, or None when matplotlib is missing."""
    try:
        import matplotlib
    except ImportError:
        print("matplotlib not installed; skipping the figure")
        return None
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt
