import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export const HASH = "0123456789ab";

export function ferCsv(points: Array<{ ebn0: number; fer: number;
                                       lo?: number; hi?: number }>): string {
  const lines = [`# esrl-sim v1 config=${HASH}`, "ebn0_db,metric,value"];
  for (const p of points) {
    lines.push(`${p.ebn0},frames,1000`);
    lines.push(`${p.ebn0},frame_errors,${Math.round(p.fer * 1000)}`);
    lines.push(`${p.ebn0},fer,${p.fer}`);
    lines.push(`${p.ebn0},fer_lo,${p.lo ?? p.fer * 0.8}`);
    lines.push(`${p.ebn0},fer_hi,${p.hi ?? Math.min(1, p.fer * 1.25)}`);
    lines.push(`${p.ebn0},ber,${p.fer / 10}`);
    lines.push(`${p.ebn0},mean_iterations,4.5`);
  }
  return lines.join("\n") + "\n";
}

export function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "esrl-plots-"));
}

export function writeCsv(dir: string, name: string, text: string): string {
  const path = join(dir, name);
  writeFileSync(path, text, "ascii");
  return path;
}
