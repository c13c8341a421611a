/**
 * U-Net-style per-cell binary classifier, sized for CPU training: a 4x4/4
 * patchify stem, two downsampling stages over widths 16/32/64 with skip
 * connections on the way back up, and a 4x/4 transposed-conv head back to
 * cell resolution. Fully convolutional, so any (16-divisible) grid works.
 */

import * as tf from "@tensorflow/tfjs";
import * as fs from "fs";
import * as path from "path";

export function buildModel(seed = 1): tf.LayersModel {
  const init = tf.initializers.glorotUniform({ seed });
  const conv = (filters: number, kernel: number, strides = 1) =>
    tf.layers.conv2d({
      filters,
      kernelSize: kernel,
      strides,
      padding: "same",
      activation: "relu",
      kernelInitializer: init,
    });

  const input = tf.input({ shape: [null, null, 1] });
  const stem = conv(16, 4, 4).apply(input) as tf.SymbolicTensor;
  const d1 = conv(16, 3).apply(stem) as tf.SymbolicTensor;
  const p1 = tf.layers.maxPooling2d({ poolSize: 2 }).apply(d1) as tf.SymbolicTensor;
  const d2 = conv(32, 3).apply(p1) as tf.SymbolicTensor;
  const p2 = tf.layers.maxPooling2d({ poolSize: 2 }).apply(d2) as tf.SymbolicTensor;
  const bottleneck = conv(64, 3).apply(p2) as tf.SymbolicTensor;

  let up2 = tf.layers
    .conv2dTranspose({ filters: 32, kernelSize: 2, strides: 2, padding: "same", activation: "relu", kernelInitializer: init })
    .apply(bottleneck) as tf.SymbolicTensor;
  up2 = tf.layers.concatenate().apply([up2, d2]) as tf.SymbolicTensor;
  up2 = conv(32, 3).apply(up2) as tf.SymbolicTensor;

  let up1 = tf.layers
    .conv2dTranspose({ filters: 16, kernelSize: 2, strides: 2, padding: "same", activation: "relu", kernelInitializer: init })
    .apply(up2) as tf.SymbolicTensor;
  up1 = tf.layers.concatenate().apply([up1, d1]) as tf.SymbolicTensor;
  up1 = conv(16, 3).apply(up1) as tf.SymbolicTensor;

  const trunkLogits = tf.layers
    .conv2dTranspose({ filters: 1, kernelSize: 4, strides: 4, padding: "same", kernelInitializer: init })
    .apply(up1) as tf.SymbolicTensor;
  // full-resolution skip straight from the input; zero-initialized so the
  // untrained model predicts chance, but the per-cell linear path converges
  // in a handful of steps while the trunk learns context
  const cellLogits = tf.layers
    .conv2d({ filters: 1, kernelSize: 1, padding: "same", kernelInitializer: "zeros" })
    .apply(input) as tf.SymbolicTensor;
  const logits = tf.layers.add().apply([trunkLogits, cellLogits]) as tf.SymbolicTensor;

  return tf.model({ inputs: input, outputs: logits });
}

/** Save topology + weights to <dir>/model.json and <dir>/weights.bin
 * (plain-node stand-in for the file:// handler). */
export async function saveModel(model: tf.LayersModel, dir: string): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const weights = artifacts.weightData as ArrayBuffer;
      fs.writeFileSync(path.join(dir, "weights.bin"), Buffer.from(weights));
      fs.writeFileSync(
        path.join(dir, "model.json"),
        JSON.stringify(
          {
            modelTopology: artifacts.modelTopology,
            weightSpecs: artifacts.weightSpecs,
            format: artifacts.format,
            generatedBy: artifacts.generatedBy,
          },
          null,
          2
        )
      );
      return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: "JSON" } };
    })
  );
}

export async function loadModel(dir: string): Promise<tf.LayersModel> {
  const manifestPath = path.join(dir, "model.json");
  if (!fs.existsSync(manifestPath)) throw new Error(`no checkpoint at ${dir}`);
  const manifest = JSON.parse(fs.readFileSync(manifestPath, "utf-8"));
  const weightData = fs.readFileSync(path.join(dir, "weights.bin"));
  if (!manifest.modelTopology || !manifest.weightSpecs) {
    throw new Error(`corrupt checkpoint at ${dir}`);
  }
  return tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: manifest.modelTopology,
      weightSpecs: manifest.weightSpecs,
      weightData: weightData.buffer.slice(weightData.byteOffset, weightData.byteOffset + weightData.byteLength),
    })
  );
}
