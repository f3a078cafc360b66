import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { createHash } from 'node:crypto';
import { fileURLToPath } from 'node:url';

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import {
  binarizeImages,
  readIdxImages,
  readImages,
  readJsonImages,
} from '../src/binarize.js';
import { CheckpointParseError } from '../src/errors.js';
import { buildCorpus, writeJson } from '../src/interchange.js';
import { main } from '../src/cli.js';

const FIXTURES = path.join(path.dirname(fileURLToPath(import.meta.url)), 'fixtures');

// regenerated only by scripts/make_fixture_idx.mjs
const IDX_SHA256 = '6130d34b4ffafb7e8cbfdc8bc2f1597565a6be06c05f4536632a0ae85377b59c';

let tmp: string;

beforeAll(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'acnmap-binarize-'));
});

afterAll(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

function makeIdx(images: number[][][]): Buffer {
  const count = images.length;
  const rows = images[0].length;
  const cols = images[0][0].length;
  const header = Buffer.alloc(16);
  header.writeUInt32BE(0x00000803, 0);
  header.writeUInt32BE(count, 4);
  header.writeUInt32BE(rows, 8);
  header.writeUInt32BE(cols, 12);
  const pixels = Buffer.from(images.flat(2));
  return Buffer.concat([header, pixels]);
}

describe('thresholding', () => {
  it('is strictly-above: 128 -> 1, 127 -> 0', () => {
    const set = { images: [Uint8Array.from([127, 128, 0, 255])], rows: 2, cols: 2 };
    expect(binarizeImages(set)).toEqual([[0, 1, 0, 1]]);
  });

  it('an all-black image becomes the zero vector', () => {
    const set = { images: [new Uint8Array(16)], rows: 4, cols: 4 };
    expect(binarizeImages(set)).toEqual([new Array(16).fill(0)]);
  });

  it('honors a custom threshold', () => {
    const set = { images: [Uint8Array.from([10, 11])], rows: 1, cols: 2 };
    expect(binarizeImages(set, 10)).toEqual([[0, 1]]);
    expect(() => binarizeImages(set, 300)).toThrow(RangeError);
  });
});

describe('IDX reader', () => {
  it('parses images row-major', () => {
    const file = path.join(tmp, 'two.idx');
    fs.writeFileSync(
      file,
      makeIdx([
        [
          [0, 255],
          [128, 127],
        ],
        [
          [1, 2],
          [3, 4],
        ],
      ]),
    );
    const set = readIdxImages(file);
    expect(set.rows).toBe(2);
    expect(set.cols).toBe(2);
    expect(Array.from(set.images[0])).toEqual([0, 255, 128, 127]);
    expect(Array.from(set.images[1])).toEqual([1, 2, 3, 4]);
  });

  it('rejects wrong magic, dtype and truncation', () => {
    const file = path.join(tmp, 'bad.idx');
    fs.writeFileSync(file, Buffer.from([1, 2, 3, 4]));
    expect(() => readIdxImages(file)).toThrow(CheckpointParseError);
    const good = makeIdx([[[0]]]);
    fs.writeFileSync(file, good.subarray(0, good.length - 1));
    expect(() => readIdxImages(file)).toThrow(CheckpointParseError);
  });
});

describe('JSON reader', () => {
  it('accepts 2-D grids and flat rows', () => {
    const file = path.join(tmp, 'imgs.json');
    fs.writeFileSync(file, JSON.stringify([[[0, 128], [255, 1]]]));
    expect(Array.from(readJsonImages(file).images[0])).toEqual([0, 128, 255, 1]);
    fs.writeFileSync(file, JSON.stringify([[0, 128, 255, 1]]));
    expect(Array.from(readJsonImages(file).images[0])).toEqual([0, 128, 255, 1]);
  });

  it('rejects non-8-bit pixels', () => {
    const file = path.join(tmp, 'deep.json');
    fs.writeFileSync(file, JSON.stringify([[0, 256]]));
    expect(() => readJsonImages(file)).toThrow(CheckpointParseError);
  });
});

describe('committed fixture corpus', () => {
  it('the IDX fixture is pinned and binarizes to the committed corpus', () => {
    const idx = path.join(FIXTURES, 'digits4.idx');
    const digest = createHash('sha256').update(fs.readFileSync(idx)).digest('hex');
    expect(digest).toBe(IDX_SHA256);

    const out = path.join(tmp, 'corpus.json');
    writeJson(buildCorpus(binarizeImages(readImages(idx))), out);
    expect(fs.readFileSync(out, 'utf-8')).toBe(
      fs.readFileSync(path.join(FIXTURES, 'corpus4.json'), 'utf-8'),
    );
  });

  it('the cli reproduces it end to end', () => {
    const out = path.join(tmp, 'cli-corpus.json');
    expect(
      main([
        'binarize-images',
        '--input',
        path.join(FIXTURES, 'digits4.idx'),
        '--out',
        out,
      ]),
    ).toBe(0);
    expect(fs.readFileSync(out, 'utf-8')).toBe(
      fs.readFileSync(path.join(FIXTURES, 'corpus4.json'), 'utf-8'),
    );
  });
});
