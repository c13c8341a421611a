/** Training configuration with desk-scale defaults. All knobs are config,
 * not claims: tiles are pinned to the generator's 512x512 grid geometry,
 * everything else is sized for CPU training. */

export interface TrainingConfig {
  learningRate: number;
  epochs: number;
  trainStepsPerEpoch: number;
  valStepsPerEpoch: number;
  /** AWGN amplitude range for training augmentation (uniform draw). */
  trainSigma: [number, number];
  /** Fixed AWGN amplitude for validation tiles. */
  valSigma: number;
  tileFrames: number;
  tileBins: number;
  /** Square crop edge fed to each optimizer step (must divide the tile). */
  cropSize: number;
  /** Fraction of training crops centered on a random foreground cell. */
  fgBias: number;
  batchSize: number;
  seed: number;
}

export const DEFAULT_CONFIG: TrainingConfig = {
  learningRate: 3e-4,
  epochs: 20,
  trainStepsPerEpoch: 25,
  valStepsPerEpoch: 25,
  trainSigma: [1e-3, 0.5],
  valSigma: 0.03,
  tileFrames: 512,
  tileBins: 512,
  cropSize: 128,
  fgBias: 0.5,
  batchSize: 1,
  seed: 0,
};

export function mergeConfig(partial: Partial<TrainingConfig>): TrainingConfig {
  const cfg = { ...DEFAULT_CONFIG, ...partial };
  if (cfg.tileBins !== 512 || cfg.tileFrames % 16 !== 0) {
    throw new Error("tile geometry must match the generator grid (bins=512, frames % 16 == 0)");
  }
  if (cfg.trainSigma[0] <= 0 || cfg.trainSigma[1] < cfg.trainSigma[0]) {
    throw new Error("trainSigma must be a positive range");
  }
  if (cfg.cropSize % 16 !== 0 || cfg.cropSize > Math.min(cfg.tileFrames, cfg.tileBins)) {
    throw new Error("cropSize must be a multiple of 16 within the tile");
  }
  return cfg;
}
