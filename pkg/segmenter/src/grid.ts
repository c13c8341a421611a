/**
 * Spectrogram tiles and mask geometry, bit-compatible with the generator:
 * 512-sample frames, no overlap, fftshifted bins, cells normalized as
 * (log(|X| + 1e-12) - mean) / (std + 1e-12); masks rasterized by cell-center
 * inclusion; interchange files in the WBMASK01 layout.
 */

import * as fs from "fs";
import { fft, fftshift } from "./fft";

export const FFT_SIZE = 512;
export const LOG_EPS = 1e-12;
const MASK_MAGIC = "WBMASK01";

export interface Grid {
  values: Float32Array; // frames x bins, row-major
  frames: number;
  bins: number;
  normMean: number;
  normStd: number;
}

export interface Mask {
  values: Uint8Array; // frames x bins, row-major, 0/1
  frames: number;
  bins: number;
}

/**
 * Normalized log-magnitude grid over floor(n / fftSize) frames. Statistics
 * are computed over the whole grid, exactly like the generator, with the
 * intermediate math in float64.
 */
export function spectrogram(samples: Float64Array, nSamples: number, fftSize = FFT_SIZE): Grid {
  const frames = Math.floor(nSamples / fftSize);
  if (frames < 1) throw new Error(`buffer of ${nSamples} samples is shorter than one ${fftSize}-sample frame`);
  const logmag = new Float64Array(frames * fftSize);
  const re = new Float64Array(fftSize);
  const im = new Float64Array(fftSize);
  for (let t = 0; t < frames; t++) {
    for (let i = 0; i < fftSize; i++) {
      re[i] = samples[2 * (t * fftSize + i)];
      im[i] = samples[2 * (t * fftSize + i) + 1];
    }
    fft(re, im);
    const mags = new Float64Array(fftSize);
    for (let k = 0; k < fftSize; k++) {
      mags[k] = Math.log(Math.hypot(re[k], im[k]) + LOG_EPS);
    }
    logmag.set(fftshift(mags), t * fftSize);
  }
  let sum = 0;
  for (let i = 0; i < logmag.length; i++) sum += logmag[i];
  const mean = sum / logmag.length;
  let varsum = 0;
  for (let i = 0; i < logmag.length; i++) {
    const d = logmag[i] - mean;
    varsum += d * d;
  }
  const std = Math.sqrt(varsum / logmag.length) + LOG_EPS;
  const values = new Float32Array(logmag.length);
  for (let i = 0; i < logmag.length; i++) values[i] = (logmag[i] - mean) / std;
  return { values, frames, bins: fftSize, normMean: mean, normStd: std };
}

/** Cell true iff its center lies inside any box (half-open membership). */
export function rasterize(
  boxes: { tStart: number; tEnd: number; fLow: number; fHigh: number }[],
  frames: number,
  bins: number = FFT_SIZE
): Mask {
  const values = new Uint8Array(frames * bins);
  for (const box of boxes) {
    for (let t = 0; t < frames; t++) {
      const tc = (t + 0.5) * bins;
      if (tc < box.tStart || tc >= box.tEnd) continue;
      for (let k = 0; k < bins; k++) {
        const fc = -0.5 + (k + 0.5) / bins;
        if (fc >= box.fLow && fc < box.fHigh) values[t * bins + k] = 1;
      }
    }
  }
  return { values, frames, bins };
}

/** Pack row-major cells 8 per byte, most significant bit first. */
function packBits(values: Uint8Array): Buffer {
  const out = Buffer.alloc(Math.ceil(values.length / 8));
  for (let i = 0; i < values.length; i++) {
    if (values[i]) out[i >> 3] |= 0x80 >> (i & 7);
  }
  return out;
}

export function writeMask(mask: Mask, path: string, provenance?: object): void {
  const header = Buffer.alloc(16);
  header.write(MASK_MAGIC, 0, "ascii");
  header.writeUInt32LE(mask.frames, 8);
  header.writeUInt32LE(mask.bins, 12);
  const trailer: any = { fft_size: mask.bins, frames: mask.frames, bins: mask.bins };
  if (provenance) trailer.provenance = provenance;
  const trailerKeys = Object.keys(trailer).sort();
  const sorted: any = {};
  for (const k of trailerKeys) sorted[k] = trailer[k];
  fs.writeFileSync(path, Buffer.concat([header, packBits(mask.values), Buffer.from(JSON.stringify(sorted), "utf-8")]));
}

export function readMask(path: string): { mask: Mask; trailer: any } {
  const blob = fs.readFileSync(path);
  if (blob.length < 16 || blob.toString("ascii", 0, 8) !== MASK_MAGIC) {
    throw new Error("not a mask interchange file (bad magic)");
  }
  const frames = blob.readUInt32LE(8);
  const bins = blob.readUInt32LE(12);
  const nCells = frames * bins;
  const nBytes = Math.ceil(nCells / 8);
  const values = new Uint8Array(nCells);
  for (let i = 0; i < nCells; i++) {
    values[i] = (blob[16 + (i >> 3)] >> (7 - (i & 7))) & 1;
  }
  const trailerRaw = blob.subarray(16 + nBytes).toString("utf-8");
  const trailer = trailerRaw.length ? JSON.parse(trailerRaw) : {};
  return { mask: { values, frames, bins }, trailer };
}
