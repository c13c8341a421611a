/**
 * Inference: record -> normalized spectrogram -> sigmoid per cell -> mask
 * thresholded at 0.5 -> WBMASK01 interchange file. The mask geometry always
 * equals the record's grid geometry (floor(samples/512) frames x 512 bins);
 * frames are zero-padded to a multiple of 16 through the network and
 * cropped back.
 */

import * as tf from "@tensorflow/tfjs";
import { FFT_SIZE, Grid, Mask, spectrogram, writeMask } from "./grid";
import { loadModel } from "./model";
import { readRecord } from "./sigmf";

export const PROB_THRESHOLD = 0.5;

export function predictMask(model: tf.LayersModel, grid: Grid): Mask {
  const padFrames = Math.ceil(grid.frames / 16) * 16;
  const probs = tf.tidy(() => {
    let x = tf.tensor4d(grid.values, [1, grid.frames, grid.bins, 1]);
    if (padFrames !== grid.frames) {
      x = x.pad([
        [0, 0],
        [0, padFrames - grid.frames],
        [0, 0],
        [0, 0],
      ]);
    }
    const logits = model.apply(x) as tf.Tensor4D;
    return tf.sigmoid(logits).squeeze([0, 3]) as tf.Tensor2D;
  });
  const data = probs.dataSync();
  probs.dispose();
  const values = new Uint8Array(grid.frames * grid.bins);
  for (let t = 0; t < grid.frames; t++) {
    for (let k = 0; k < grid.bins; k++) {
      values[t * grid.bins + k] = data[t * grid.bins + k] > PROB_THRESHOLD ? 1 : 0;
    }
  }
  return { values, frames: grid.frames, bins: grid.bins };
}

export async function inferRecord(checkpointDir: string, recordStem: string, outPath: string): Promise<Mask> {
  const model = await loadModel(checkpointDir);
  const record = readRecord(recordStem);
  const grid = spectrogram(record.samples, record.nSamples, FFT_SIZE);
  const mask = predictMask(model, grid);
  writeMask(mask, outPath, { checkpoint: checkpointDir, record: recordStem, threshold: PROB_THRESHOLD });
  model.dispose();
  return mask;
}

async function main() {
  const args = new Map<string, string>();
  for (let i = 2; i < process.argv.length; i += 2) args.set(process.argv[i], process.argv[i + 1]);
  const checkpoint = args.get("--model");
  const record = args.get("--record");
  const out = args.get("--out");
  if (!checkpoint || !record || !out) {
    console.error("usage: node infer.js --model <dir> --record <stem> --out <mask path>");
    process.exit(2);
  }
  const mask = await inferRecord(checkpoint, record, out);
  let on = 0;
  for (const v of mask.values) on += v;
  console.log(`${mask.frames}x${mask.bins} mask, ${((100 * on) / mask.values.length).toFixed(2)}% cells on -> ${out}`);
}

if (require.main === module) {
  main().catch((err) => {
    console.error(err);
    process.exit(1);
  });
}
