/**
 * Image-corpus binarization: 8-bit grayscale images become row-major bit
 * vectors, with 1 for every pixel strictly above the threshold (default
 * 127, so 128 -> 1 and 127 -> 0).
 *
 * Readers: IDX image files (the classic ubyte digit-dataset container)
 * and plain JSON (an array of images, each a 2-D pixel grid or an
 * already-flat row).
 */

import * as fs from 'node:fs';

import { CheckpointParseError } from './errors.js';

export const DEFAULT_THRESHOLD = 127;

export interface ImageSet {
  /** row-major pixels, one Uint8Array per image */
  images: Uint8Array[];
  rows: number;
  cols: number;
}

const IDX_UBYTE = 0x08;

export function readIdxImages(file: string): ImageSet {
  const buf = fs.readFileSync(file);
  if (buf.length < 4 || buf[0] !== 0 || buf[1] !== 0) {
    throw new CheckpointParseError(`${file}: not an IDX file`);
  }
  if (buf[2] !== IDX_UBYTE) {
    throw new CheckpointParseError(
      `${file}: IDX dtype 0x${buf[2].toString(16)} is not unsigned byte`,
    );
  }
  const ndim = buf[3];
  if (ndim !== 3) {
    throw new CheckpointParseError(`${file}: expected 3-D image IDX, got ${ndim}-D`);
  }
  const count = buf.readUInt32BE(4);
  const rows = buf.readUInt32BE(8);
  const cols = buf.readUInt32BE(12);
  const headerBytes = 4 + 4 * ndim;
  const expected = headerBytes + count * rows * cols;
  if (buf.length !== expected) {
    throw new CheckpointParseError(
      `${file}: expected ${expected} bytes for ${count} ${rows}x${cols} images, found ${buf.length}`,
    );
  }
  const images: Uint8Array[] = [];
  for (let k = 0; k < count; k++) {
    const start = headerBytes + k * rows * cols;
    images.push(new Uint8Array(buf.subarray(start, start + rows * cols)));
  }
  return { images, rows, cols };
}

export function readJsonImages(file: string): ImageSet {
  let data: unknown;
  try {
    data = JSON.parse(fs.readFileSync(file, 'utf-8'));
  } catch (err) {
    throw new CheckpointParseError(`${file}: ${(err as Error).message}`);
  }
  const arr = Array.isArray(data) ? data : (data as { images?: unknown }).images;
  if (!Array.isArray(arr) || arr.length === 0) {
    throw new CheckpointParseError(`${file}: expected a non-empty image array`);
  }
  const images: Uint8Array[] = [];
  let rows = 1;
  let cols = -1;
  for (const entry of arr) {
    let flat: number[];
    if (Array.isArray(entry) && Array.isArray(entry[0])) {
      rows = entry.length;
      flat = (entry as number[][]).flat();
    } else if (Array.isArray(entry)) {
      flat = entry as number[];
    } else {
      throw new CheckpointParseError(`${file}: image entries must be arrays`);
    }
    if (cols === -1) {
      cols = flat.length / rows;
    } else if (flat.length !== rows * cols) {
      throw new CheckpointParseError(`${file}: images disagree on pixel count`);
    }
    for (const p of flat) {
      if (!Number.isInteger(p) || p < 0 || p > 255) {
        throw new CheckpointParseError(`${file}: pixel ${p} is not 8-bit grayscale`);
      }
    }
    images.push(Uint8Array.from(flat));
  }
  return { images, rows, cols };
}

export function readImages(file: string): ImageSet {
  const head = fs.readFileSync(file).subarray(0, 4);
  if (head[0] === 0 && head[1] === 0 && head[2] === IDX_UBYTE) {
    return readIdxImages(file);
  }
  return readJsonImages(file);
}

export function binarizeImages(
  set: ImageSet,
  threshold: number = DEFAULT_THRESHOLD,
): number[][] {
  if (!Number.isInteger(threshold) || threshold < 0 || threshold > 255) {
    throw new RangeError(`threshold ${threshold} outside 0..255`);
  }
  return set.images.map((img) => Array.from(img, (p) => (p > threshold ? 1 : 0)));
}
