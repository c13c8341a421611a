export { DEFAULT_CONFIG, TrainingConfig, mergeConfig } from "./config";
export { FFT_SIZE, Grid, Mask, rasterize, readMask, spectrogram, writeMask } from "./grid";
export { buildModel, loadModel, saveModel } from "./model";
export { Rng } from "./rng";
export { readRecord, writeRecord } from "./sigmf";
export { TileDataset, buildTiles, findRecordStems } from "./tiles";
export { LossHistory, TrainResult, train } from "./train";
export { PROB_THRESHOLD, inferRecord, predictMask } from "./infer";
