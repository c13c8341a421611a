/**
 * Minimal SigMF access for the benchmark records: ci16_le interleaved data
 * plus JSON metadata, with the generator's scale-factor extension so floats
 * reconstruct exactly up to quantization. Writing is only needed to persist
 * noise-injected copies of records for held-out evaluation.
 */

import * as fs from "fs";

export interface TruthBox {
  tStart: number;
  tEnd: number;
  fLow: number; // normalized
  fHigh: number;
  label: string;
}

export interface Record {
  /** interleaved re/im float64, length 2 * nSamples */
  samples: Float64Array;
  nSamples: number;
  sampleRate: number;
  scale: number;
  boxes: TruthBox[];
  meta: any;
}

export function readRecord(stem: string): Record {
  const meta = JSON.parse(fs.readFileSync(`${stem}.sigmf-meta`, "utf-8"));
  const g = meta.global ?? {};
  if (g["core:datatype"] !== "ci16_le") {
    throw new Error(`unsupported datatype ${g["core:datatype"]}`);
  }
  const sampleRate = g["core:sample_rate"] ?? 1.0;
  const scale = g["widesig:scale_factor"] ?? 1.0;
  const raw = fs.readFileSync(`${stem}.sigmf-data`);
  if (raw.length % 4 !== 0) {
    throw new Error(`data file length ${raw.length} is not a multiple of 4 bytes`);
  }
  const nSamples = raw.length / 4;
  const samples = new Float64Array(2 * nSamples);
  for (let i = 0; i < 2 * nSamples; i++) {
    samples[i] = raw.readInt16LE(2 * i) / scale;
  }
  const boxes: TruthBox[] = [];
  for (const ann of meta.annotations ?? []) {
    boxes.push({
      tStart: ann["core:sample_start"],
      tEnd: ann["core:sample_start"] + ann["core:sample_count"],
      fLow: ann["core:freq_lower_edge"] / sampleRate,
      fHigh: ann["core:freq_upper_edge"] / sampleRate,
      label: ann["core:label"] ?? "",
    });
  }
  return { samples, nSamples, sampleRate, scale, boxes, meta };
}

/** Round half away from zero, matching the generator's quantizer. */
function quant(x: number): number {
  const v = Math.sign(x) * Math.floor(Math.abs(x) + 0.5);
  return Math.max(-32767, Math.min(32767, v));
}

export function writeRecord(stem: string, samples: Float64Array, meta: any): void {
  let peak = 0;
  for (let i = 0; i < samples.length; i++) {
    const a = Math.abs(samples[i]);
    if (a > peak) peak = a;
  }
  const scale = peak > 0 ? 32000 / peak : 1.0;
  const buf = Buffer.alloc(samples.length * 2);
  for (let i = 0; i < samples.length; i++) {
    buf.writeInt16LE(quant(samples[i] * scale), 2 * i);
  }
  fs.writeFileSync(`${stem}.sigmf-data`, buf);
  const outMeta = { ...meta, global: { ...meta.global, "widesig:scale_factor": scale } };
  fs.writeFileSync(`${stem}.sigmf-meta`, JSON.stringify(outMeta, null, 2) + "\n");
}
