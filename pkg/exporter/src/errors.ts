/** A selected layer is not a dense layer with per-neuron weights and bias. */
export class UnsupportedLayer extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'UnsupportedLayer';
  }
}

/** Checkpoint or image file cannot be parsed. */
export class CheckpointParseError extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'CheckpointParseError';
  }
}
