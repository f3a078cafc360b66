/**
 * Writers for the mapping toolchain's interchange formats (version 1).
 *
 * Networks store weights and biases as decimal strings: the shortest
 * round-trip rendering of the checkpoint's double value, so re-importing
 * reproduces the exact bit pattern on any platform. A neuron's `bias`
 * field is the threshold tau in y = [w.x >= tau]; checkpoints that store
 * an additive pre-activation bias b (z = w.x + b) are converted with
 * tau = -b when requested.
 */

import * as fs from 'node:fs';

import { DenseLayer, neuronWeights, unitCount } from './checkpoint.js';
import { inferQuantization } from './quantization.js';

export const FORMAT_VERSION = 1;
export const UNITS = { capacitance: 'fF', voltage: 'V' } as const;

export type BiasMode = 'threshold' | 'additive';

export interface ExportOptions {
  name: string;
  /** activation per selected layer; defaults to binary..binary,linear */
  activations?: string[];
  biasMode?: BiasMode;
}

/** Shortest decimal that parses back to the identical double. */
export function toDecimal(x: number): string {
  if (Object.is(x, -0)) {
    return '-0.0';
  }
  return String(x);
}

export interface NeuronJson {
  name: string;
  weights: string[];
  bias: string;
  quantization: string;
  bits?: number;
}

export interface LayerJson {
  name: string;
  activation: string;
  neurons: NeuronJson[];
}

export interface NetworkJson {
  format: 'acn-network';
  version: number;
  units: typeof UNITS;
  name: string;
  layers: LayerJson[];
}

function exportNeuron(layer: DenseLayer, unit: number, biasMode: BiasMode): NeuronJson {
  const weights = neuronWeights(layer, unit);
  const rawBias = layer.bias[unit];
  const bias = biasMode === 'additive' ? -rawBias : rawBias;
  const tag = inferQuantization(weights);
  const neuron: NeuronJson = {
    name: `${layer.name}_${unit}`,
    weights: weights.map(toDecimal),
    bias: toDecimal(bias),
    quantization: tag.quantization,
  };
  if (tag.bits !== undefined) {
    neuron.bits = tag.bits;
  }
  return neuron;
}

export function buildNetwork(layers: DenseLayer[], options: ExportOptions): NetworkJson {
  if (layers.length === 0) {
    throw new Error('no layers selected');
  }
  const activations =
    options.activations ??
    layers.map((_, i) => (i === layers.length - 1 ? 'linear' : 'binary'));
  if (activations.length !== layers.length) {
    throw new Error(
      `got ${activations.length} activations for ${layers.length} layers`,
    );
  }
  for (const a of activations) {
    if (a !== 'binary' && a !== 'linear') {
      throw new Error(`unknown activation ${a}`);
    }
  }
  const biasMode = options.biasMode ?? 'threshold';
  return {
    format: 'acn-network',
    version: FORMAT_VERSION,
    units: UNITS,
    name: options.name,
    layers: layers.map((layer, i) => ({
      name: layer.name,
      activation: activations[i],
      neurons: Array.from({ length: unitCount(layer) }, (_, j) =>
        exportNeuron(layer, j, biasMode),
      ),
    })),
  };
}

export interface CorpusJson {
  format: 'acn-corpus';
  version: number;
  units: typeof UNITS;
  inputs: number[][];
}

export function buildCorpus(rows: number[][]): CorpusJson {
  return { format: 'acn-corpus', version: FORMAT_VERSION, units: UNITS, inputs: rows };
}

/** Stable serialization: sorted keys, two-space indent, trailing newline. */
export function writeJson(data: unknown, file: string): void {
  fs.writeFileSync(file, stableStringify(data, 0) + '\n');
}

function stableStringify(value: unknown, depth: number): string {
  const pad = '  '.repeat(depth + 1);
  const close = '  '.repeat(depth);
  if (Array.isArray(value)) {
    if (value.length === 0) {
      return '[]';
    }
    const items = value.map((v) => pad + stableStringify(v, depth + 1));
    return '[\n' + items.join(',\n') + '\n' + close + ']';
  }
  if (value !== null && typeof value === 'object') {
    const keys = Object.keys(value as Record<string, unknown>).sort();
    if (keys.length === 0) {
      return '{}';
    }
    const items = keys.map(
      (k) =>
        pad +
        JSON.stringify(k) +
        ': ' +
        stableStringify((value as Record<string, unknown>)[k], depth + 1),
    );
    return '{\n' + items.join(',\n') + '\n' + close + '}';
  }
  return JSON.stringify(value);
}
