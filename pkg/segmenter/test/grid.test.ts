import * as assert from "node:assert/strict";
import { test } from "node:test";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { fft, fftshift } from "../src/fft";
import { rasterize, readMask, spectrogram, writeMask } from "../src/grid";
import { Rng } from "../src/rng";

function naiveDft(re: Float64Array, im: Float64Array): { re: Float64Array; im: Float64Array } {
  const n = re.length;
  const or = new Float64Array(n);
  const oi = new Float64Array(n);
  for (let k = 0; k < n; k++) {
    let sr = 0;
    let si = 0;
    for (let t = 0; t < n; t++) {
      const a = (-2 * Math.PI * k * t) / n;
      sr += re[t] * Math.cos(a) - im[t] * Math.sin(a);
      si += re[t] * Math.sin(a) + im[t] * Math.cos(a);
    }
    or[k] = sr;
    oi[k] = si;
  }
  return { re: or, im: oi };
}

test("fft matches a naive DFT oracle", () => {
  const rng = new Rng(1);
  const n = 128;
  const re = new Float64Array(n);
  const im = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    re[i] = rng.gauss();
    im[i] = rng.gauss();
  }
  const oracle = naiveDft(re, im);
  fft(re, im);
  for (let k = 0; k < n; k++) {
    assert.ok(Math.abs(re[k] - oracle.re[k]) < 1e-8);
    assert.ok(Math.abs(im[k] - oracle.im[k]) < 1e-8);
  }
});

test("fftshift puts the center bin first", () => {
  const x = new Float64Array([0, 1, 2, 3]);
  assert.deepEqual(Array.from(fftshift(x)), [2, 3, 0, 1]);
});

test("spectrogram of white noise is normalized", () => {
  const rng = new Rng(7);
  const n = 512 * 32;
  const samples = new Float64Array(2 * n);
  for (let i = 0; i < samples.length; i++) samples[i] = rng.gauss();
  const grid = spectrogram(samples, n);
  assert.equal(grid.frames, 32);
  assert.equal(grid.bins, 512);
  let sum = 0;
  let sq = 0;
  for (const v of grid.values) {
    sum += v;
    sq += v * v;
  }
  const mean = sum / grid.values.length;
  const std = Math.sqrt(sq / grid.values.length - mean * mean);
  assert.ok(Math.abs(mean) < 1e-5);
  assert.ok(Math.abs(std - 1) < 1e-5);
});

test("rasterize uses cell-center inclusion", () => {
  const mask = rasterize([{ tStart: 0, tEnd: 512, fLow: -0.5, fHigh: -0.5 + 1 / 512 }], 4, 512);
  let on = 0;
  for (const v of mask.values) on += v;
  assert.equal(on, 1);
  assert.equal(mask.values[0], 1); // frame 0, bin 0
});

test("mask file round trip and header layout", () => {
  const rng = new Rng(3);
  const frames = 37;
  const bins = 64;
  const values = new Uint8Array(frames * bins);
  for (let i = 0; i < values.length; i++) values[i] = rng.random() < 0.3 ? 1 : 0;
  const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "wbmask-"));
  const p = path.join(tmp, "m.wbmask");
  writeMask({ values, frames, bins }, p, { source: "unit" });
  const blob = fs.readFileSync(p);
  assert.equal(blob.toString("ascii", 0, 8), "WBMASK01");
  assert.equal(blob.readUInt32LE(8), frames);
  assert.equal(blob.readUInt32LE(12), bins);
  const { mask, trailer } = readMask(p);
  assert.deepEqual(Array.from(mask.values), Array.from(values));
  assert.equal(trailer.provenance.source, "unit");
  fs.rmSync(tmp, { recursive: true, force: true });
});

test("rng streams are deterministic and child streams differ", () => {
  const a = new Rng(42);
  const b = new Rng(42);
  for (let i = 0; i < 16; i++) assert.equal(a.nextU32(), b.nextU32());
  const c1 = new Rng(42).child(1);
  const c2 = new Rng(42).child(2);
  assert.notEqual(c1.nextU32(), c2.nextU32());
});
