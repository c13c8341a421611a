/**
 * Training loop: each epoch runs trainStepsPerEpoch optimizer steps on
 * random noise-augmented crops followed by valStepsPerEpoch forward passes
 * at the fixed validation sigma; mean BCE for both is recorded per epoch.
 * Aborts with a diagnostic if the loss diverges.
 */

import * as tf from "@tensorflow/tfjs";
import * as fs from "fs";
import * as path from "path";
import { TrainingConfig, mergeConfig } from "./config";
import { buildModel, saveModel } from "./model";
import { Rng } from "./rng";
import { TileDataset, TileSample, buildTiles } from "./tiles";

export interface LossHistory {
  train: number[];
  validation: number[];
}

function cropTensors(
  sample: TileSample,
  cropSize: number,
  rng: Rng,
  fgBias = 0
): { x: tf.Tensor4D; y: tf.Tensor4D } {
  const { input, target } = sample;
  const maxT = input.frames - cropSize;
  const maxK = input.bins - cropSize;
  let t0 = maxT > 0 ? rng.int(maxT + 1) : 0;
  let k0 = maxK > 0 ? rng.int(maxK + 1) : 0;
  if (fgBias > 0 && rng.random() < fgBias) {
    // center the crop on a random foreground cell when any exists
    const fg: number[] = [];
    for (let i = 0; i < target.values.length; i++) if (target.values[i]) fg.push(i);
    if (fg.length > 0) {
      const cell = fg[rng.int(fg.length)];
      const ct = Math.floor(cell / input.bins);
      const ck = cell % input.bins;
      t0 = Math.max(0, Math.min(maxT, ct - cropSize / 2));
      k0 = Math.max(0, Math.min(maxK, ck - cropSize / 2));
    }
  }
  const x = new Float32Array(cropSize * cropSize);
  const y = new Float32Array(cropSize * cropSize);
  for (let t = 0; t < cropSize; t++) {
    const src = (t0 + t) * input.bins + k0;
    const dst = t * cropSize;
    x.set(input.values.subarray(src, src + cropSize), dst);
    for (let k = 0; k < cropSize; k++) y[dst + k] = target.values[src + k];
  }
  return {
    x: tf.tensor4d(x, [1, cropSize, cropSize, 1]),
    y: tf.tensor4d(y, [1, cropSize, cropSize, 1]),
  };
}

function bceStep(model: tf.LayersModel, optimizer: tf.Optimizer, x: tf.Tensor4D, y: tf.Tensor4D): number {
  const lossTensor = optimizer.minimize(
    () => tf.losses.sigmoidCrossEntropy(y, model.apply(x) as tf.Tensor),
    true
  ) as tf.Scalar;
  const loss = lossTensor.dataSync()[0];
  lossTensor.dispose();
  return loss;
}

export function bceEval(model: tf.LayersModel, x: tf.Tensor4D, y: tf.Tensor4D): number {
  return tf.tidy(() => tf.losses.sigmoidCrossEntropy(y, model.apply(x) as tf.Tensor).dataSync()[0]);
}

export interface TrainResult {
  model: tf.LayersModel;
  history: LossHistory;
}

export async function train(
  dataset: TileDataset,
  configPartial: Partial<TrainingConfig> = {},
  checkpointDir?: string
): Promise<TrainResult> {
  const config = mergeConfig(configPartial);
  const rng = new Rng(config.seed);
  const model = buildModel(config.seed + 1);
  const optimizer = tf.train.adam(config.learningRate);
  const history: LossHistory = { train: [], validation: [] };

  const drawRng = rng.child(0);
  const cropRng = rng.child(1);
  let noiseCounter = 0;

  for (let epoch = 0; epoch < config.epochs; epoch++) {
    let trainSum = 0;
    for (let step = 0; step < config.trainStepsPerEpoch; step++) {
      const index = drawRng.int(dataset.size);
      const sigma = drawRng.uniform(config.trainSigma[0], config.trainSigma[1]);
      const sample = dataset.sample(index, sigma, config.seed * 1_000_003 + noiseCounter++);
      const { x, y } = cropTensors(sample, config.cropSize, cropRng, config.fgBias);
      const loss = bceStep(model, optimizer, x, y);
      x.dispose();
      y.dispose();
      if (!Number.isFinite(loss)) {
        throw new Error(`training diverged: BCE=${loss} at epoch ${epoch} step ${step}`);
      }
      trainSum += loss;
    }
    let valSum = 0;
    for (let step = 0; step < config.valStepsPerEpoch; step++) {
      const index = drawRng.int(dataset.size);
      const sample = dataset.sample(index, config.valSigma, 7_000_000 + config.seed * 1_000_003 + step);
      const { x, y } = cropTensors(sample, config.cropSize, cropRng);
      valSum += bceEval(model, x, y);
      x.dispose();
      y.dispose();
    }
    history.train.push(trainSum / config.trainStepsPerEpoch);
    history.validation.push(valSum / config.valStepsPerEpoch);
  }

  if (checkpointDir) {
    await saveModel(model, checkpointDir);
    fs.writeFileSync(path.join(checkpointDir, "loss_history.json"), JSON.stringify(history, null, 2) + "\n");
    fs.writeFileSync(path.join(checkpointDir, "config.json"), JSON.stringify(config, null, 2) + "\n");
  }
  return { model, history };
}

async function main() {
  const args = new Map<string, string>();
  for (let i = 2; i < process.argv.length; i += 2) args.set(process.argv[i], process.argv[i + 1]);
  const recordsDir = args.get("--records");
  const outDir = args.get("--out");
  if (!recordsDir || !outDir) {
    console.error("usage: node train.js --records <dir> --out <dir> [--config <json>] [--epochs N]");
    process.exit(2);
  }
  let partial: Partial<TrainingConfig> = {};
  const configPath = args.get("--config");
  if (configPath) partial = JSON.parse(fs.readFileSync(configPath, "utf-8"));
  if (args.has("--epochs")) partial.epochs = Number(args.get("--epochs"));
  const dataset = buildTiles(recordsDir, mergeConfig(partial));
  const { history } = await train(dataset, partial, outDir);
  console.log(`trained ${history.train.length} epochs; final train BCE ${history.train.at(-1)?.toFixed(4)}`);
}

if (require.main === module) {
  main().catch((err) => {
    console.error(err);
    process.exit(1);
  });
}
