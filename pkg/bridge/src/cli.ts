#!/usr/bin/env node
/** CLI: read a pose source and stream engine-order skeleton frames as NDJSON. */

import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";
import { openOutput, streamFrames } from "./emit.js";
import {
  openLiveSource,
  RecordedSource,
  SourceUnavailable,
  WeightsMissing,
  type PoseSource,
} from "./sources.js";

const USAGE = `usage: hpe-bridge --source <camera:N | video.mp4 | clip.json> [options]

options:
  --source <spec>    capture device ("camera:0" or "0"), video file, or a
                     recorded estimator clip (.json) to replay
  --out <spec>       stdout (default) or tcp:<host>:<port>
  --fps-cap <n>      drop frames to stay at or below n per second (default 30)
  --weights <path>   estimator weights (live sources only; or HPE_BRIDGE_WEIGHTS)
`;

async function openSource(source: string, weights: string | undefined): Promise<PoseSource> {
  if (source.endsWith(".json")) {
    return await RecordedSource.open(source);
  }
  return await openLiveSource({ source, weightsFlag: weights });
}

export async function main(argv: string[]): Promise<number> {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        source: { type: "string" },
        out: { type: "string", default: "stdout" },
        "fps-cap": { type: "string", default: "30" },
        weights: { type: "string" },
        help: { type: "boolean", default: false },
      },
      allowPositionals: false,
    }));
  } catch (err) {
    process.stderr.write(`hpe-bridge: ${(err as Error).message}\n${USAGE}`);
    return 1;
  }
  if (values.help) {
    process.stdout.write(USAGE);
    return 0;
  }
  if (!values.source) {
    process.stderr.write(`hpe-bridge: --source is required\n${USAGE}`);
    return 1;
  }
  const fpsCap = Number(values["fps-cap"]);
  if (!Number.isFinite(fpsCap) || fpsCap <= 0) {
    process.stderr.write(`hpe-bridge: bad --fps-cap ${values["fps-cap"]}\n`);
    return 1;
  }

  try {
    const source = await openSource(values.source, values.weights);
    const sink = await openOutput(values.out!);
    const stats = await streamFrames(source, sink, { fpsCap });
    await sink.close();
    process.stderr.write(
      `hpe-bridge: ${stats.framesIn} frames in, ${stats.framesEmitted} kept, ${stats.records} records\n`,
    );
    return 0;
  } catch (err) {
    if (err instanceof WeightsMissing) {
      process.stderr.write(`hpe-bridge: ${err.message}\n`);
      return 3;
    }
    if (err instanceof SourceUnavailable) {
      process.stderr.write(`hpe-bridge: ${err.message}\n`);
      return 2;
    }
    process.stderr.write(`hpe-bridge: ${(err as Error).message}\n`);
    return 2;
  }
}

const entry = process.argv[1];
if (entry && import.meta.url === pathToFileURL(entry).href) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
