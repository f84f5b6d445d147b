/** Streaming loop: pose source -> remap -> NDJSON lines on stdout or TCP. */

import { createConnection } from "node:net";
import type { Writable } from "node:stream";
import type { PoseSource } from "./sources.js";
import { SourceUnavailable } from "./sources.js";
import { formatFrame, remapPose } from "./wire.js";

export interface LineSink {
  write(line: string): Promise<void>;
  close(): Promise<void>;
}

class StreamSink implements LineSink {
  constructor(
    private stream: Writable,
    private owned: boolean,
  ) {}

  write(line: string): Promise<void> {
    return new Promise((resolve, reject) => {
      this.stream.write(line + "\n", (err) => (err ? reject(err) : resolve()));
    });
  }

  close(): Promise<void> {
    if (!this.owned) {
      return Promise.resolve();
    }
    return new Promise((resolve) => this.stream.end(() => resolve()));
  }
}

/** Open "stdout" or "tcp:<host>:<port>"; connection failures are fatal here. */
export async function openOutput(spec: string, stdout: Writable = process.stdout): Promise<LineSink> {
  if (spec === "stdout") {
    return new StreamSink(stdout, false);
  }
  const m = /^tcp:(.+):(\d+)$/.exec(spec);
  if (!m) {
    throw new Error(`bad output ${spec}: expected stdout or tcp:<host>:<port>`);
  }
  const host = m[1]!;
  const port = Number(m[2]);
  const socket = await new Promise<Writable>((resolve, reject) => {
    const s = createConnection({ host, port }, () => resolve(s));
    s.on("error", (err) => reject(new SourceUnavailable(`cannot connect to ${spec}: ${err.message}`)));
  });
  return new StreamSink(socket, true);
}

export interface StreamOptions {
  /** Upper bound on emitted frame rate; undefined passes every frame through. */
  fpsCap?: number;
}

export interface StreamStats {
  framesIn: number;
  framesEmitted: number;
  records: number;
}

/**
 * Drain the source, remap every detected person, and write one NDJSON line
 * per person per emitted frame.  The fps cap subsamples by timestamp: a frame
 * is dropped while less than floor(1000 / cap) ms have passed since the last
 * emitted one.  Frames with no detections still consume a frame_id so ids
 * stay aligned with the source.
 */
export async function streamFrames(
  source: PoseSource,
  sink: LineSink,
  opts: StreamOptions = {},
): Promise<StreamStats> {
  const minGapMs = opts.fpsCap ? Math.floor(1000 / opts.fpsCap) : 0;
  const stats: StreamStats = { framesIn: 0, framesEmitted: 0, records: 0 };
  let lastEmitTms: number | undefined;
  for await (const frame of source) {
    const frameId = stats.framesIn;
    stats.framesIn += 1;
    if (lastEmitTms !== undefined && frame.tMs - lastEmitTms < minGapMs) {
      continue;
    }
    lastEmitTms = frame.tMs;
    stats.framesEmitted += 1;
    for (const person of frame.persons) {
      const line = formatFrame({
        frame_id: frameId,
        ts_ms: frame.tMs,
        person_id: person.id,
        points: remapPose(person.keypoints),
      });
      await sink.write(line);
      stats.records += 1;
    }
  }
  return stats;
}
