/**
 * Checkpoint readers. Two on-disk shapes are supported:
 *
 * 1. TensorFlow.js layers-model: a `model.json` with the topology and a
 *    weights manifest pointing at little-endian float32 `.bin` shards.
 *    Dense kernels have shape [inputDim, units]; neuron j's weights are
 *    kernel column j.
 * 2. A plain JSON checkpoint: `{"layers": [{name, kernel, bias}]}` with
 *    the same kernel orientation, values stored as JSON numbers.
 *
 * The reader never transforms values: whatever the checkpoint stores
 * (including float32 promoted to double) is what gets exported.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { CheckpointParseError, UnsupportedLayer } from './errors.js';

export interface DenseLayer {
  name: string;
  /** kernel[i][j]: weight from input i into unit j */
  kernel: number[][];
  bias: number[];
}

export interface Checkpoint {
  name: string;
  layers: DenseLayer[];
}

export function neuronWeights(layer: DenseLayer, unit: number): number[] {
  return layer.kernel.map((row) => row[unit]);
}

export function unitCount(layer: DenseLayer): number {
  return layer.kernel[0]?.length ?? 0;
}

function validateLayer(layer: DenseLayer): void {
  const { name, kernel, bias } = layer;
  if (!Array.isArray(kernel) || kernel.length === 0 || !Array.isArray(kernel[0])) {
    throw new UnsupportedLayer(`${name}: kernel must be a 2-D array`);
  }
  const units = kernel[0].length;
  if (units === 0 || kernel.some((row) => row.length !== units)) {
    throw new UnsupportedLayer(`${name}: kernel rows are ragged`);
  }
  if (!Array.isArray(bias) || bias.length !== units) {
    throw new UnsupportedLayer(
      `${name}: bias length ${bias?.length} does not match ${units} units`,
    );
  }
  for (const row of kernel) {
    for (const w of row) {
      if (typeof w !== 'number' || !isFinite(w)) {
        throw new UnsupportedLayer(`${name}: non-finite kernel value`);
      }
    }
  }
}

export function readSimpleCheckpoint(file: string): Checkpoint {
  let data: unknown;
  try {
    data = JSON.parse(fs.readFileSync(file, 'utf-8'));
  } catch (err) {
    throw new CheckpointParseError(`${file}: ${(err as Error).message}`);
  }
  const obj = data as { name?: string; layers?: DenseLayer[] };
  if (!obj || !Array.isArray(obj.layers)) {
    throw new CheckpointParseError(`${file}: expected {"layers": [...]}`);
  }
  for (const layer of obj.layers) {
    if (typeof layer.name !== 'string') {
      throw new CheckpointParseError(`${file}: layer without a name`);
    }
    validateLayer(layer);
  }
  return { name: obj.name ?? path.basename(file, '.json'), layers: obj.layers };
}

// ---------------------------------------------------------- TFJS models

interface WeightSpec {
  name: string;
  shape: number[];
  dtype: string;
}

interface ManifestGroup {
  paths: string[];
  weights: WeightSpec[];
}

function readWeightData(modelDir: string, groups: ManifestGroup[]): Map<string, { shape: number[]; data: Float32Array }> {
  const out = new Map<string, { shape: number[]; data: Float32Array }>();
  for (const group of groups) {
    const buffers = group.paths.map((p) => {
      const file = path.join(modelDir, p);
      if (!fs.existsSync(file)) {
        throw new CheckpointParseError(`missing weight shard ${file}`);
      }
      return fs.readFileSync(file);
    });
    const blob = Buffer.concat(buffers);
    let offset = 0;
    for (const spec of group.weights) {
      const count = spec.shape.reduce((a, b) => a * b, 1);
      if (spec.dtype !== 'float32') {
        throw new CheckpointParseError(
          `${spec.name}: unsupported weight dtype ${spec.dtype}`,
        );
      }
      const bytes = count * 4;
      if (offset + bytes > blob.length) {
        throw new CheckpointParseError(`${spec.name}: weight shard truncated`);
      }
      const data = new Float32Array(count);
      for (let i = 0; i < count; i++) {
        data[i] = blob.readFloatLE(offset + 4 * i);
      }
      out.set(spec.name, { shape: spec.shape, data });
      offset += bytes;
    }
  }
  return out;
}

interface TfjsLayerConfig {
  class_name: string;
  config: { name: string; units?: number };
}

export function readTfjsModel(modelJson: string): Checkpoint {
  let data: {
    modelTopology?: { model_config?: { config?: { name?: string; layers?: TfjsLayerConfig[] } } };
    weightsManifest?: ManifestGroup[];
  };
  try {
    data = JSON.parse(fs.readFileSync(modelJson, 'utf-8'));
  } catch (err) {
    throw new CheckpointParseError(`${modelJson}: ${(err as Error).message}`);
  }
  const config = data.modelTopology?.model_config?.config;
  const manifest = data.weightsManifest;
  if (!config?.layers || !manifest) {
    throw new CheckpointParseError(
      `${modelJson}: not a layers-model (missing topology or weights manifest)`,
    );
  }
  const tensors = readWeightData(path.dirname(modelJson), manifest);

  const layers: DenseLayer[] = [];
  for (const layer of config.layers) {
    const name = layer.config.name;
    // dense variants only (incl. quantized dense layers); anything else
    // that carries kernels is unsupported, weightless layers are skipped
    const kernelEntry =
      tensors.get(`${name}/kernel`) ?? tensors.get(`${name}/${name}/kernel`);
    if (!kernelEntry) {
      continue;
    }
    if (!/dense/i.test(layer.class_name)) {
      throw new UnsupportedLayer(
        `${name}: ${layer.class_name} layers cannot be exported`,
      );
    }
    if (kernelEntry.shape.length !== 2) {
      throw new UnsupportedLayer(`${name}: kernel is not 2-D`);
    }
    const [inputDim, units] = kernelEntry.shape;
    const biasEntry =
      tensors.get(`${name}/bias`) ?? tensors.get(`${name}/${name}/bias`);
    const kernel: number[][] = [];
    for (let i = 0; i < inputDim; i++) {
      const row = new Array<number>(units);
      for (let j = 0; j < units; j++) {
        row[j] = kernelEntry.data[i * units + j];
      }
      kernel.push(row);
    }
    const bias = biasEntry
      ? Array.from(biasEntry.data)
      : new Array<number>(units).fill(0);
    const dense = { name, kernel, bias };
    validateLayer(dense);
    layers.push(dense);
  }
  if (layers.length === 0) {
    throw new CheckpointParseError(`${modelJson}: no dense layers found`);
  }
  return { name: config.name ?? path.basename(path.dirname(modelJson)), layers };
}

export function readCheckpoint(input: string): Checkpoint {
  const stat = fs.statSync(input, { throwIfNoEntry: false });
  if (!stat) {
    throw new CheckpointParseError(`${input}: no such file or directory`);
  }
  if (stat.isDirectory()) {
    return readTfjsModel(path.join(input, 'model.json'));
  }
  const head = JSON.parse(fs.readFileSync(input, 'utf-8'));
  if (head && typeof head === 'object' && 'weightsManifest' in head) {
    return readTfjsModel(input);
  }
  return readSimpleCheckpoint(input);
}

export function selectLayers(checkpoint: Checkpoint, names?: string[]): DenseLayer[] {
  if (!names || names.length === 0) {
    return checkpoint.layers;
  }
  return names.map((name) => {
    const layer = checkpoint.layers.find((l) => l.name === name);
    if (!layer) {
      const have = checkpoint.layers.map((l) => l.name).join(', ');
      throw new UnsupportedLayer(`no dense layer named ${name} (have: ${have})`);
    }
    return layer;
  });
}
