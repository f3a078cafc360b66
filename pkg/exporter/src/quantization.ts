/**
 * Quantization tag inference for exported weight vectors.
 *
 * The tag is metadata for the mapping toolchain: binary when every weight
 * is exactly +/-1, k-bit when the weights sit on a uniform grid (as
 * produced by uniform quantizers over [-1, 1]), real otherwise. The
 * tolerance absorbs float32 storage of checkpoints.
 */

export interface QuantizationTag {
  quantization: 'real' | 'kbit' | 'binary';
  bits?: number;
}

const GRID_TOLERANCE = 1e-6;

function near(a: number, b: number): boolean {
  return Math.abs(a - b) <= GRID_TOLERANCE * Math.max(1, Math.abs(a), Math.abs(b));
}

export function inferQuantization(weights: readonly number[]): QuantizationTag {
  if (weights.length === 0) {
    return { quantization: 'real' };
  }
  if (weights.every((w) => w === 1 || w === -1)) {
    return { quantization: 'binary' };
  }

  const distinct = Array.from(new Set(weights)).sort((a, b) => a - b);
  if (distinct.length < 3) {
    // one or two levels that are not (+/-1): not enough structure to
    // call it a quantizer grid
    return { quantization: 'real' };
  }

  // candidate step: smallest gap between neighboring levels
  let step = Infinity;
  for (let i = 1; i < distinct.length; i++) {
    step = Math.min(step, distinct[i] - distinct[i - 1]);
  }
  if (!(step > 0) || !isFinite(step)) {
    return { quantization: 'real' };
  }
  for (const v of distinct) {
    const offset = (v - distinct[0]) / step;
    if (Math.abs(offset - Math.round(offset)) > GRID_TOLERANCE * Math.max(1, offset)) {
      return { quantization: 'real' };
    }
  }

  // uniform quantizers over [-1, 1] use 2^k levels with step 2/(2^k - 1);
  // recover k from the step, otherwise size k to the observed level span
  const m = 2 / step;
  const roundedM = Math.round(m);
  if (near(m, roundedM) && Number.isInteger(Math.log2(roundedM + 1))) {
    return { quantization: 'kbit', bits: Math.log2(roundedM + 1) };
  }
  const span = Math.round((distinct[distinct.length - 1] - distinct[0]) / step) + 1;
  return { quantization: 'kbit', bits: Math.max(1, Math.ceil(Math.log2(span))) };
}
