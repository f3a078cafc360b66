#!/usr/bin/env node
/**
 * acnmap-export: turn trained checkpoints and image sets into the mapping
 * toolchain's interchange files.
 *
 * Usage:
 *   acnmap-export export-model --input <checkpoint> --out <network.json>
 *       [--layers hidden,output] [--activations binary,linear]
 *       [--bias-mode threshold|additive] [--name NAME]
 *   acnmap-export binarize-images --input <images.idx|images.json>
 *       --out <corpus.json> [--threshold 127]
 *
 * `--input` accepts a TensorFlow.js layers-model (model.json or its
 * directory) or a plain JSON checkpoint {"layers": [{name, kernel,
 * bias}]}. `--bias-mode additive` converts a pre-activation bias b into
 * the threshold convention (tau = -b); the default copies thresholds
 * verbatim.
 */

import * as path from 'node:path';

import { binarizeImages, DEFAULT_THRESHOLD, readImages } from './binarize.js';
import { readCheckpoint, selectLayers } from './checkpoint.js';
import { CheckpointParseError, UnsupportedLayer } from './errors.js';
import { BiasMode, buildCorpus, buildNetwork, writeJson } from './interchange.js';

interface Args {
  [key: string]: string | undefined;
}

function parseArgs(argv: string[]): { command: string; args: Args } {
  const [command, ...rest] = argv;
  const args: Args = {};
  for (let i = 0; i < rest.length; i++) {
    const arg = rest[i];
    if (!arg.startsWith('--')) {
      throw new Error(`unexpected argument ${arg}`);
    }
    const key = arg.slice(2);
    const value = rest[++i];
    if (value === undefined) {
      throw new Error(`missing value for --${key}`);
    }
    args[key] = value;
  }
  return { command: command ?? '', args };
}

function require_(args: Args, key: string): string {
  const value = args[key];
  if (value === undefined) {
    throw new Error(`--${key} is required`);
  }
  return value;
}

function exportModel(args: Args): void {
  const input = require_(args, 'input');
  const out = require_(args, 'out');
  const checkpoint = readCheckpoint(input);
  const layers = selectLayers(
    checkpoint,
    args['layers'] ? args['layers'].split(',') : undefined,
  );
  const biasMode = (args['bias-mode'] ?? 'threshold') as BiasMode;
  if (biasMode !== 'threshold' && biasMode !== 'additive') {
    throw new Error(`unknown --bias-mode ${biasMode}`);
  }
  const network = buildNetwork(layers, {
    name: args['name'] ?? checkpoint.name,
    activations: args['activations']?.split(','),
    biasMode,
  });
  writeJson(network, out);
  const counts = network.layers
    .map((l) => `${l.name}: ${l.neurons.length}x${l.neurons[0].weights.length}`)
    .join(', ');
  console.log(`exported ${network.layers.length} layers (${counts}) -> ${out}`);
}

function binarize(args: Args): void {
  const input = require_(args, 'input');
  const out = require_(args, 'out');
  const threshold = args['threshold']
    ? parseInt(args['threshold'], 10)
    : DEFAULT_THRESHOLD;
  const set = readImages(input);
  const corpus = buildCorpus(binarizeImages(set, threshold));
  writeJson(corpus, out);
  console.log(
    `binarized ${corpus.inputs.length} ${set.rows}x${set.cols} images` +
      ` (threshold ${threshold}) -> ${out}`,
  );
}

export function main(argv: string[]): number {
  try {
    const { command, args } = parseArgs(argv);
    switch (command) {
      case 'export-model':
        exportModel(args);
        return 0;
      case 'binarize-images':
        binarize(args);
        return 0;
      case '':
      case 'help':
      case '--help':
        console.log(
          'commands: export-model --input <checkpoint> --out <network.json>\n' +
            '          binarize-images --input <images> --out <corpus.json>',
        );
        return command === '' ? 2 : 0;
      default:
        console.error(`unknown command ${command}`);
        return 2;
    }
  } catch (err) {
    if (err instanceof UnsupportedLayer) {
      console.error(`unsupported layer: ${err.message}`);
      return 4;
    }
    if (err instanceof CheckpointParseError) {
      console.error(`parse error: ${err.message}`);
      return 3;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  path.resolve(process.argv[1]) === new URL(import.meta.url).pathname;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
