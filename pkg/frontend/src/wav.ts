// Just enough RIFF/WAVE parsing to learn the duration and sample format
// of an engine-rendered file. Playback itself is the browser's job; this
// exists so a bundle can be sanity-checked before the trial starts.

export interface WavFormat {
  sampleRate: number;
  channels: number;
  bitsPerSample: number;
  dataBytes: number;
  frames: number;
  duration: number;
}

export class WavError extends Error {}

function tag(view: DataView, offset: number): string {
  let s = "";
  for (let i = 0; i < 4; i++) s += String.fromCharCode(view.getUint8(offset + i));
  return s;
}

export function parseWav(buf: ArrayBuffer): WavFormat {
  if (buf.byteLength < 44) {
    throw new WavError(`file too short for a WAV header (${buf.byteLength} bytes)`);
  }
  const view = new DataView(buf);
  if (tag(view, 0) !== "RIFF" || tag(view, 8) !== "WAVE") {
    throw new WavError("not a RIFF/WAVE file");
  }

  let fmt: { sampleRate: number; channels: number; bitsPerSample: number } | null = null;
  let dataBytes: number | null = null;
  let offset = 12;
  while (offset + 8 <= buf.byteLength) {
    const id = tag(view, offset);
    const size = view.getUint32(offset + 4, true);
    const body = offset + 8;
    if (id === "fmt ") {
      if (size < 16) throw new WavError("fmt chunk too short");
      const codec = view.getUint16(body, true);
      if (codec !== 1) throw new WavError(`unsupported codec ${codec}; expected PCM`);
      fmt = {
        channels: view.getUint16(body + 2, true),
        sampleRate: view.getUint32(body + 4, true),
        bitsPerSample: view.getUint16(body + 14, true),
      };
    } else if (id === "data") {
      dataBytes = Math.min(size, buf.byteLength - body);
    }
    offset = body + size + (size % 2); // chunks are word-aligned
  }

  if (fmt === null) throw new WavError("missing fmt chunk");
  if (dataBytes === null) throw new WavError("missing data chunk");
  if (fmt.sampleRate <= 0 || fmt.channels <= 0 || fmt.bitsPerSample <= 0) {
    throw new WavError("degenerate format chunk");
  }
  const bytesPerFrame = fmt.channels * (fmt.bitsPerSample / 8);
  const frames = Math.floor(dataBytes / bytesPerFrame);
  return {
    sampleRate: fmt.sampleRate,
    channels: fmt.channels,
    bitsPerSample: fmt.bitsPerSample,
    dataBytes,
    frames,
    duration: frames / fmt.sampleRate,
  };
}
