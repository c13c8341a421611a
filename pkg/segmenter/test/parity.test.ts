/** Cross-component contract: tiles built here must match the generator's
 * golden files (inputs within 1e-5 per cell, target masks exactly). */

import * as assert from "node:assert/strict";
import { test } from "node:test";
import * as fs from "fs";
import * as path from "path";

import { mergeConfig } from "../src/config";
import { readMask } from "../src/grid";
import { buildTiles } from "../src/tiles";
import { ensureFixtures, fixturePath } from "./fixtures";

test("preprocessing parity with generator golden tiles (1e-5 per cell)", () => {
  ensureFixtures();
  const dir = fixturePath("parity");
  const cfg = mergeConfig({ trainSigma: [1e-9, 2e-9] });
  const ds = buildTiles(dir, cfg);
  assert.ok(ds.size >= 2);
  for (let i = 0; i < ds.size; i++) {
    const sample = ds.sample(i, 0, 0); // sigma 0: identical input bytes
    const base = path.join(dir, "golden", `${sample.provenance.record}.tile${sample.provenance.tile}`);
    const golden = new Float32Array(fs.readFileSync(`${base}.f32`).buffer.slice(0));
    assert.equal(golden.length, sample.input.values.length);
    let worst = 0;
    for (let j = 0; j < golden.length; j++) {
      const d = Math.abs(golden[j] - sample.input.values[j]);
      if (d > worst) worst = d;
    }
    assert.ok(worst < 1e-5, `tile ${i}: worst input diff ${worst}`);

    const goldenMask = readMask(`${base}.wbmask`).mask;
    assert.deepEqual(Array.from(sample.target.values), Array.from(goldenMask.values), `tile ${i} targets differ`);
  }
});

test("golden normalization stats agree", () => {
  const dir = fixturePath("parity");
  const cfg = mergeConfig({ trainSigma: [1e-9, 2e-9] });
  const ds = buildTiles(dir, cfg);
  const sample = ds.sample(0, 0, 0);
  const meta = JSON.parse(
    fs.readFileSync(path.join(dir, "golden", `${sample.provenance.record}.tile0.json`), "utf-8")
  );
  assert.ok(Math.abs(meta.norm_mean - sample.input.normMean) < 1e-9);
  assert.ok(Math.abs(meta.norm_std - sample.input.normStd) < 1e-9);
});

test("empty-annotation record yields all-false targets", () => {
  const ds = buildTiles(fixturePath("silent"), mergeConfig({ trainSigma: [1e-9, 2e-9] }));
  const sample = ds.sample(0, 0.01, 5);
  for (const v of sample.target.values) assert.equal(v, 0);
});

test("fixed seed gives identical tiles across runs", () => {
  const cfg = mergeConfig({ trainSigma: [1e-3, 0.5] });
  const a = buildTiles(fixturePath("parity"), cfg).sample(0, 0.25, 1234);
  const b = buildTiles(fixturePath("parity"), cfg).sample(0, 0.25, 1234);
  assert.deepEqual(Array.from(a.input.values), Array.from(b.input.values));
  assert.deepEqual(Array.from(a.target.values), Array.from(b.target.values));
});

test("records shorter than one tile are a geometry error", () => {
  assert.throws(() => buildTiles(fixturePath("parity"), mergeConfig({ tileFrames: 1024 })), /tile/);
});
