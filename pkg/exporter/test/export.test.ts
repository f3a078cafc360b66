import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { readCheckpoint, readSimpleCheckpoint, selectLayers } from '../src/checkpoint.js';
import { UnsupportedLayer } from '../src/errors.js';
import { buildNetwork, toDecimal, writeJson } from '../src/interchange.js';
import { main } from '../src/cli.js';

let tmp: string;

beforeAll(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'acnmap-exporter-'));
});

afterAll(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

function writeSimpleCheckpoint(file: string, inputDim = 784, units = 16) {
  // deterministic pseudo-weights; values exercise the decimal encoder
  const kernel = Array.from({ length: inputDim }, (_, i) =>
    Array.from({ length: units }, (_, j) => Math.sin(i * 31 + j * 7) / 10),
  );
  const bias = Array.from({ length: units }, (_, j) => Math.cos(j) / 100);
  const layers = [
    { name: 'hidden', kernel, bias },
    {
      name: 'output',
      kernel: Array.from({ length: units }, (_, i) =>
        Array.from({ length: 4 }, (_, j) => Math.sin(i + j) / 2),
      ),
      bias: [0.01, -0.02, 0.03, -0.04],
    },
  ];
  fs.writeFileSync(file, JSON.stringify({ name: 'mlp', layers }));
  return layers;
}

describe('toDecimal', () => {
  it('round-trips doubles through their shortest decimal', () => {
    for (const x of [0.1, -1 / 3, 1e-300, 6.02e23, 128, Math.fround(0.1)]) {
      expect(Number(toDecimal(x))).toBe(x);
    }
  });

  it('keeps the sign of negative zero', () => {
    expect(toDecimal(-0)).toBe('-0.0');
    expect(Object.is(Number(toDecimal(-0)), -0)).toBe(true);
  });
});

describe('export from a plain JSON checkpoint', () => {
  it('maps a 784 -> 16 dense layer to 16 neurons of width 784', () => {
    const file = path.join(tmp, 'mlp.json');
    const layers = writeSimpleCheckpoint(file);
    const checkpoint = readSimpleCheckpoint(file);
    const network = buildNetwork(selectLayers(checkpoint), { name: 'mlp' });

    expect(network.format).toBe('acn-network');
    expect(network.version).toBe(1);
    expect(network.layers.map((l) => l.activation)).toEqual(['binary', 'linear']);
    const hidden = network.layers[0];
    expect(hidden.neurons).toHaveLength(16);
    for (const [j, neuron] of hidden.neurons.entries()) {
      expect(neuron.weights).toHaveLength(784);
      // column-major extraction: neuron j holds kernel[:, j], verbatim
      for (let i = 0; i < 784; i++) {
        expect(Number(neuron.weights[i])).toBe(layers[0].kernel[i][j]);
      }
      expect(Number(neuron.bias)).toBe(layers[0].bias[j]);
      expect(neuron.quantization).toBe('real');
    }
  });

  it('tags an all +/-1 kernel binary', () => {
    const file = path.join(tmp, 'bnn.json');
    fs.writeFileSync(
      file,
      JSON.stringify({
        layers: [
          {
            name: 'hidden',
            kernel: [
              [1, -1],
              [-1, -1],
              [1, 1],
            ],
            bias: [0.5, 0.5],
          },
        ],
      }),
    );
    const network = buildNetwork(selectLayers(readCheckpoint(file)), {
      name: 'bnn',
      activations: ['binary'],
    });
    for (const neuron of network.layers[0].neurons) {
      expect(neuron.quantization).toBe('binary');
    }
  });

  it('converts additive biases to thresholds on request', () => {
    const file = path.join(tmp, 'bias.json');
    fs.writeFileSync(
      file,
      JSON.stringify({
        layers: [{ name: 'h', kernel: [[1], [2]], bias: [0.25] }],
      }),
    );
    const checkpoint = readCheckpoint(file);
    const verbatim = buildNetwork(checkpoint.layers, { name: 'x' });
    const additive = buildNetwork(checkpoint.layers, { name: 'x', biasMode: 'additive' });
    expect(Number(verbatim.layers[0].neurons[0].bias)).toBe(0.25);
    expect(Number(additive.layers[0].neurons[0].bias)).toBe(-0.25);
  });

  it('rejects ragged and mismatched layers', () => {
    const file = path.join(tmp, 'bad.json');
    fs.writeFileSync(
      file,
      JSON.stringify({ layers: [{ name: 'h', kernel: [[1, 2], [3]], bias: [0, 0] }] }),
    );
    expect(() => readCheckpoint(file)).toThrow(UnsupportedLayer);
    fs.writeFileSync(
      file,
      JSON.stringify({ layers: [{ name: 'h', kernel: [[1, 2]], bias: [0] }] }),
    );
    expect(() => readCheckpoint(file)).toThrow(UnsupportedLayer);
  });

  it('rejects unknown layer selections', () => {
    const file = path.join(tmp, 'sel.json');
    writeSimpleCheckpoint(file, 4, 2);
    const checkpoint = readCheckpoint(file);
    expect(() => selectLayers(checkpoint, ['nope'])).toThrow(UnsupportedLayer);
    expect(selectLayers(checkpoint, ['output'])).toHaveLength(1);
  });
});

function writeTfjsModel(dir: string) {
  fs.mkdirSync(dir, { recursive: true });
  // 3-input -> 2-unit dense + 2 -> 1 head, float32 shards
  const kernel1 = Float32Array.from([0.1, -0.2, 0.3, 0.4, -0.5, 0.6]); // [3,2]
  const bias1 = Float32Array.from([0.05, -0.05]);
  const kernel2 = Float32Array.from([1.5, -2.5]); // [2,1]
  const bias2 = Float32Array.from([0.125]);
  const blob = Buffer.concat(
    [kernel1, bias1, kernel2, bias2].map((a) => Buffer.from(a.buffer.slice(0))),
  );
  fs.writeFileSync(path.join(dir, 'group1-shard1of1.bin'), blob);
  const model = {
    modelTopology: {
      model_config: {
        class_name: 'Sequential',
        config: {
          name: 'seq',
          layers: [
            { class_name: 'Dense', config: { name: 'dense', units: 2 } },
            { class_name: 'Dense', config: { name: 'dense_1', units: 1 } },
          ],
        },
      },
    },
    weightsManifest: [
      {
        paths: ['group1-shard1of1.bin'],
        weights: [
          { name: 'dense/kernel', shape: [3, 2], dtype: 'float32' },
          { name: 'dense/bias', shape: [2], dtype: 'float32' },
          { name: 'dense_1/kernel', shape: [2, 1], dtype: 'float32' },
          { name: 'dense_1/bias', shape: [1], dtype: 'float32' },
        ],
      },
    ],
  };
  fs.writeFileSync(path.join(dir, 'model.json'), JSON.stringify(model));
  return { kernel1, bias1, kernel2, bias2 };
}

describe('export from a TensorFlow.js layers-model', () => {
  it('reads float32 shards and keeps the promoted values exactly', () => {
    const dir = path.join(tmp, 'tfjs-model');
    const { kernel1, bias1 } = writeTfjsModel(dir);
    const checkpoint = readCheckpoint(dir);
    expect(checkpoint.layers.map((l) => l.name)).toEqual(['dense', 'dense_1']);
    const network = buildNetwork(checkpoint.layers, { name: 'seq' });
    const hidden = network.layers[0];
    expect(hidden.neurons).toHaveLength(2);
    for (let j = 0; j < 2; j++) {
      for (let i = 0; i < 3; i++) {
        // float32 storage promoted to double, rendered losslessly
        expect(Number(hidden.neurons[j].weights[i])).toBe(kernel1[i * 2 + j]);
      }
      expect(Number(hidden.neurons[j].bias)).toBe(bias1[j]);
    }
  });

  it('rejects non-dense layers that carry kernels', () => {
    const dir = path.join(tmp, 'tfjs-conv');
    writeTfjsModel(dir);
    const model = JSON.parse(fs.readFileSync(path.join(dir, 'model.json'), 'utf-8'));
    model.modelTopology.model_config.config.layers[0].class_name = 'Conv2D';
    fs.writeFileSync(path.join(dir, 'model.json'), JSON.stringify(model));
    expect(() => readCheckpoint(dir)).toThrow(UnsupportedLayer);
  });
});

describe('cli', () => {
  it('export-model writes a deterministic network file', () => {
    const file = path.join(tmp, 'cli-mlp.json');
    writeSimpleCheckpoint(file, 6, 3);
    const out1 = path.join(tmp, 'net1.json');
    const out2 = path.join(tmp, 'net2.json');
    expect(main(['export-model', '--input', file, '--out', out1])).toBe(0);
    expect(main(['export-model', '--input', file, '--out', out2])).toBe(0);
    expect(fs.readFileSync(out1)).toEqual(fs.readFileSync(out2));
    const data = JSON.parse(fs.readFileSync(out1, 'utf-8'));
    expect(data.format).toBe('acn-network');
  });

  it('maps error classes to exit codes', () => {
    const missing = path.join(tmp, 'missing.json');
    expect(main(['export-model', '--input', missing, '--out', missing])).toBe(3);
    expect(main(['frobnicate'])).toBe(2);
  });
});

describe('writeJson determinism', () => {
  it('sorts keys and ends with a newline', () => {
    const out = path.join(tmp, 'stable.json');
    writeJson({ b: 1, a: [1, 2], c: { z: 0, y: 1 } }, out);
    const text = fs.readFileSync(out, 'utf-8');
    expect(text.endsWith('}\n')).toBe(true);
    expect(text.indexOf('"a"')).toBeLessThan(text.indexOf('"b"'));
    expect(text.indexOf('"y"')).toBeLessThan(text.indexOf('"z"'));
  });
});
