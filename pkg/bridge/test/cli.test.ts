import { execFile } from "node:child_process";
import { fileURLToPath } from "node:url";
import { promisify } from "node:util";
import { describe, expect, it } from "vitest";

const run = promisify(execFile);
const CLI = fileURLToPath(new URL("../dist/src/cli.js", import.meta.url));
const FIXTURE = fileURLToPath(new URL("../fixtures/clip.json", import.meta.url));

// strip vars that would leak weights into the child
const cleanEnv = { ...process.env };
delete cleanEnv.HPE_BRIDGE_WEIGHTS;

async function cli(...args: string[]): Promise<{ code: number; stdout: string; stderr: string }> {
  try {
    const { stdout, stderr } = await run("node", [CLI, ...args], { env: cleanEnv });
    return { code: 0, stdout, stderr };
  } catch (err) {
    const e = err as { code?: number; stdout?: string; stderr?: string };
    return { code: e.code ?? -1, stdout: e.stdout ?? "", stderr: e.stderr ?? "" };
  }
}

describe("hpe-bridge CLI", () => {
  it("replays a clip to stdout as parseable NDJSON", async () => {
    const { code, stdout, stderr } = await cli("--source", FIXTURE);
    expect(code).toBe(0);
    const lines = stdout.trim().split("\n");
    expect(lines).toHaveLength(285);
    for (const line of lines) {
      const rec = JSON.parse(line);
      expect(rec.points).toHaveLength(18);
      expect(typeof rec.frame_id).toBe("number");
      expect(typeof rec.ts_ms).toBe("number");
      expect(rec.person_id).toBe(0);
    }
    expect(stderr).toContain("300 frames in");
    expect(stderr).toContain("285 records");
  });

  it("subsamples under --fps-cap", async () => {
    const { code, stdout, stderr } = await cli("--source", FIXTURE, "--fps-cap", "15");
    expect(code).toBe(0);
    const lines = stdout.trim().split("\n");
    expect(lines.length).toBeLessThan(285);
    expect(lines.length).toBeGreaterThan(100);
    expect(stderr).toContain("150 kept");
  });

  it("requires --source", async () => {
    const { code, stderr } = await cli();
    expect(code).toBe(1);
    expect(stderr).toContain("--source is required");
    expect(stderr).toContain("usage:");
  });

  it("rejects a bad fps cap", async () => {
    const { code } = await cli("--source", FIXTURE, "--fps-cap", "zero");
    expect(code).toBe(1);
  });

  it("exits 2 when the clip is missing", async () => {
    const { code, stderr } = await cli("--source", "/no/such/clip.json");
    expect(code).toBe(2);
    expect(stderr).toContain("cannot open clip");
  });

  it("exits 3 when a live source has no weights", async () => {
    const { code, stderr } = await cli("--source", "camera:0");
    expect(code).toBe(3);
    expect(stderr).toContain("no estimator weights");
  });

  it("exits 2 when the live path cannot start on this host", async () => {
    const { code, stderr } = await cli("--source", "camera:0", "--weights", FIXTURE);
    expect(code).toBe(2);
    expect(stderr).toContain("cannot open camera:0");
  });
});
