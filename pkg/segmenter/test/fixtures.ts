/**
 * Shared fixtures: benchmark records and golden tiles produced by the
 * generator CLI, cached under a versioned temp directory so the suite pays
 * the generation cost once.
 */

import { execFileSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";

export const FIXTURE_DIR = path.join(os.tmpdir(), "wbsegmenter-fixtures-v2");
const REPO_ROOT = path.resolve(__dirname, "..", "..", "..");

const E2E_PROFILE = {
  name: "nn-e2e",
  bandwidth_dist: { kind: "choice", values: [0.1] },
  duration_dist: { kind: "loguniform", low: 16384, high: 33000 },
  start_time_dist: { kind: "uniform", low: 0.0, high: 1.0 },
  amplitude_db_dist: { kind: "uniform", low: 0.0, high: 0.0 },
  modulation_pool: [["PSK4", 2], ["QAM16", 1], ["GMSK", 1]],
  occupancy: 4.0,
};

const SMOKE_PROFILE = { ...E2E_PROFILE, name: "smoke" };

const SILENT_PROFILE = { ...E2E_PROFILE, name: "silent", occupancy: 0.0 };

export function python(args: string[], cwd?: string): string {
  return execFileSync("python3", args, { cwd, encoding: "utf-8", stdio: ["ignore", "pipe", "pipe"] });
}

function generate(profilePath: string, outDir: string, count: number, seed: number, recordLength = 262144): void {
  python([
    "-m", "widesig", "generate",
    "--profile", profilePath,
    "--count", String(count),
    "--out", outDir,
    "--seed", String(seed),
    "--record-length", String(recordLength),
  ]);
}

/** Generate everything once; subsequent calls reuse the cache. */
export function ensureFixtures(): string {
  const marker = path.join(FIXTURE_DIR, ".complete");
  if (fs.existsSync(marker)) return FIXTURE_DIR;
  fs.rmSync(FIXTURE_DIR, { recursive: true, force: true });
  fs.mkdirSync(FIXTURE_DIR, { recursive: true });

  const profile = (obj: object, name: string) => {
    const p = path.join(FIXTURE_DIR, name);
    fs.writeFileSync(p, JSON.stringify(obj));
    return p;
  };

  // parity set: two records round-robined over built-in profiles + goldens
  const parityDir = path.join(FIXTURE_DIR, "parity");
  python([
    "-m", "widesig", "generate",
    "--count", "2", "--out", parityDir, "--seed", "11", "--record-length", "262144",
  ]);
  python([path.join(REPO_ROOT, "scripts", "export_golden_tiles.py"), parityDir]);

  generate(profile(SILENT_PROFILE, "silent.json"), path.join(FIXTURE_DIR, "silent"), 1, 21);
  generate(profile(SMOKE_PROFILE, "smoke.json"), path.join(FIXTURE_DIR, "smoke"), 4, 55);
  generate(profile(E2E_PROFILE, "e2e.json"), path.join(FIXTURE_DIR, "e2e-train"), 10, 100);
  generate(profile(E2E_PROFILE, "e2e.json"), path.join(FIXTURE_DIR, "e2e-held"), 3, 900);

  fs.writeFileSync(marker, "ok\n");
  return FIXTURE_DIR;
}

export function fixturePath(...parts: string[]): string {
  return path.join(ensureFixtures(), ...parts);
}
