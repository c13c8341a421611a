/**
 * Tile dataset: SigMF records in, (input grid, target mask) tiles out.
 * Noise is injected in the time domain per draw (uniform sigma range for
 * training, a fixed sigma for validation), then the spectrogram and targets
 * are computed exactly like the generator, so tiles with sigma -> 0 match
 * the primary golden files.
 */

import * as fs from "fs";
import * as path from "path";
import { TrainingConfig } from "./config";
import { FFT_SIZE, Grid, Mask, rasterize, spectrogram } from "./grid";
import { Rng } from "./rng";
import { Record, readRecord } from "./sigmf";

export interface TileSample {
  input: Grid;
  target: Mask;
  provenance: { record: string; tile: number; sigma: number; seed: number };
}

export class TileDataset {
  readonly records: { stem: string; record: Record }[] = [];
  readonly tileIndex: { recordIdx: number; tile: number }[] = [];

  constructor(readonly config: TrainingConfig, stems: string[]) {
    const tileSamples = config.tileFrames * FFT_SIZE;
    for (const stem of stems) {
      const record = readRecord(stem);
      if (record.nSamples < tileSamples) {
        throw new Error(`record ${stem} shorter than one ${config.tileFrames}x${config.tileBins} tile`);
      }
      const recordIdx = this.records.length;
      this.records.push({ stem, record });
      const nTiles = Math.floor(record.nSamples / tileSamples);
      for (let k = 0; k < nTiles; k++) this.tileIndex.push({ recordIdx, tile: k });
    }
    if (this.tileIndex.length === 0) throw new Error("no tiles found");
  }

  get size(): number {
    return this.tileIndex.length;
  }

  /** Render one tile with the given noise amplitude; deterministic in (index, sigma, seed). */
  sample(index: number, sigma: number, noiseSeed: number): TileSample {
    const { recordIdx, tile } = this.tileIndex[index % this.tileIndex.length];
    const { stem, record } = this.records[recordIdx];
    const tileSamples = this.config.tileFrames * FFT_SIZE;
    const lo = tile * tileSamples;
    const chunk = record.samples.slice(2 * lo, 2 * (lo + tileSamples));
    if (sigma > 0) {
      new Rng(noiseSeed, [recordIdx, tile]).addComplexNoise(chunk, sigma);
    }
    const input = spectrogram(chunk, tileSamples);
    const shifted = record.boxes
      .filter((b) => b.tEnd > lo && b.tStart < lo + tileSamples)
      .map((b) => ({ tStart: b.tStart - lo, tEnd: b.tEnd - lo, fLow: b.fLow, fHigh: b.fHigh }));
    const target = rasterize(shifted, this.config.tileFrames, this.config.tileBins);
    return { input, target, provenance: { record: path.basename(stem), tile, sigma, seed: noiseSeed } };
  }
}

/** Record stems (paths without extension) found in a dataset directory. */
export function findRecordStems(dir: string): string[] {
  return fs
    .readdirSync(dir)
    .filter((f) => f.endsWith(".sigmf-meta"))
    .map((f) => path.join(dir, f.slice(0, -".sigmf-meta".length)))
    .sort();
}

export function buildTiles(recordsDir: string, config: TrainingConfig, stems?: string[]): TileDataset {
  return new TileDataset(config, stems ?? findRecordStems(recordsDir));
}
