#!/usr/bin/env python3
"""Generate a desk-scale benchmark dataset: records round-robined over the
16 built-in band layout profiles, plus a manifest of per-record seeds."""

import argparse
import json
from pathlib import Path

from widesig.dsp import Rng
from widesig.scene import builtin_profile, builtin_profile_names, make_scene
from widesig.sigmf_io import write_record


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--count", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--record-length", type=int, default=1 << 20)
    ap.add_argument("--sample-rate", type=float, default=100e6)
    args = ap.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    profiles = [builtin_profile(name) for name in builtin_profile_names()]
    run_rng = Rng(args.seed)
    manifest = {
        "seed": args.seed,
        "record_length": args.record_length,
        "sample_rate": args.sample_rate,
        "records": [],
    }
    for i in range(args.count):
        profile = profiles[i % len(profiles)]
        master_seed = run_rng.child(2, i).seed
        scene = make_scene(profile, args.record_length, master_seed)
        stem = args.out_dir / f"record_{i:04d}"
        write_record(scene, stem, sample_rate_hz=args.sample_rate)
        manifest["records"].append(
            {"name": stem.name, "profile": profile.name, "master_seed": master_seed, "bursts": len(scene.bursts)}
        )
        print(f"{stem.name}: {profile.name}, {len(scene.bursts)} bursts")
    (args.out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
