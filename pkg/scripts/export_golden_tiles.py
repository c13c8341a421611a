#!/usr/bin/env python3
"""Export golden preprocessing tiles for cross-implementation parity checks.

For every record in a dataset directory this writes, per 512-frame tile:
  <name>.tile<k>.f32      normalized log-magnitude grid, float32 row-major
  <name>.tile<k>.wbmask   rasterized truth mask in the interchange format
  <name>.tile<k>.json     geometry, normalization stats, provenance

Consumers recompute the same tiles from the .sigmf-data bytes and compare
against the .f32 values (expected agreement: 1e-5 per cell).
"""

import argparse
import json
from pathlib import Path

import numpy as np

from widesig.grid import GridGeometry, SpectralGrid, rasterize, spectrogram, write_mask
from widesig.sigmf_io import read_record

TILE_FRAMES = 512


def export_record(stem: Path, out_dir: Path) -> int:
    loaded = read_record(stem)
    fft_size = 512
    n_tiles = len(loaded.samples) // (TILE_FRAMES * fft_size)
    for k in range(n_tiles):
        lo = k * TILE_FRAMES * fft_size
        hi = lo + TILE_FRAMES * fft_size
        tile_buf = type(loaded.samples)(loaded.samples.samples[lo:hi], loaded.samples.sample_rate)
        grid = spectrogram(tile_buf, fft_size=fft_size)
        base = str(out_dir / f"{stem.name}.tile{k}")
        grid.values.astype("<f4").tofile(base + ".f32")

        shifted = [
            (type(box)(box.t_start - lo, box.t_end - lo, box.f_low, box.f_high), label)
            for box, label in loaded.boxes
            if box.t_end > lo and box.t_start < hi
        ]
        mask = rasterize([b for b, _ in shifted], grid.geometry)
        write_mask(mask, base + ".wbmask", provenance={"record": stem.name, "tile": k})

        meta = {
            "record": stem.name,
            "tile": k,
            "sample_offset": lo,
            "fft_size": fft_size,
            "frames": TILE_FRAMES,
            "norm_mean": grid.norm_mean,
            "norm_std": grid.norm_std,
            "n_boxes": len(shifted),
        }
        Path(base + ".json").write_text(json.dumps(meta, indent=2) + "\n")
    return n_tiles


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("dataset_dir", type=Path)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()
    out_dir = args.out or args.dataset_dir / "golden"
    out_dir.mkdir(parents=True, exist_ok=True)
    total = 0
    for meta_path in sorted(args.dataset_dir.glob("*.sigmf-meta")):
        stem = meta_path.with_suffix("")
        total += export_record(stem, out_dir)
    print(f"exported {total} tiles to {out_dir}")


if __name__ == "__main__":
    main()
