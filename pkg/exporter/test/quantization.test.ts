import { describe, expect, it } from 'vitest';

import { inferQuantization } from '../src/quantization.js';

describe('inferQuantization', () => {
  it('tags all +/-1 kernels binary', () => {
    expect(inferQuantization([1, -1, 1, 1, -1])).toEqual({ quantization: 'binary' });
    expect(inferQuantization([-1, -1])).toEqual({ quantization: 'binary' });
  });

  it('tags arbitrary reals real', () => {
    expect(inferQuantization([0.3, -0.11, 0.7261]).quantization).toBe('real');
  });

  it('recovers k from a uniform 2^k-level grid over [-1, 1]', () => {
    // 4-bit quantizer: 16 levels, step 2/15
    const step = 2 / 15;
    const grid = Array.from({ length: 16 }, (_, j) => -1 + j * step);
    expect(inferQuantization(grid)).toEqual({ quantization: 'kbit', bits: 4 });
    // partial use of the grid still recovers the step
    expect(inferQuantization([-1, -1 + step, -1 + 3 * step, 1 - step])).toEqual({
      quantization: 'kbit',
      bits: 4,
    });
  });

  it('recovers k from float32-stored grids', () => {
    const step = Math.fround(2 / 15);
    const grid = Array.from({ length: 16 }, (_, j) => Math.fround(-1 + j * step));
    expect(inferQuantization(grid)).toEqual({ quantization: 'kbit', bits: 4 });
  });

  it('sizes k to the level count for non-[-1,1] grids', () => {
    const grid = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25];
    expect(inferQuantization(grid)).toEqual({ quantization: 'kbit', bits: 3 });
  });

  it('leaves sparse or off-grid values real', () => {
    expect(inferQuantization([0.5]).quantization).toBe('real');
    expect(inferQuantization([0.1, 0.2, 0.3001]).quantization).toBe('real');
  });
});
