import { parse } from "papaparse";

/** A parsed simulator report: one metric map per sweep-key value. */
export interface SimReport {
  configHash: string;
  /** sweep key (Eb/N0 in dB, or a pruning point for threshold sweeps) */
  points: Map<number, Map<string, number>>;
  /** sweep keys in file order */
  keys: number[];
}

export class SchemaError extends Error {}

const HEADER = /^# esrl-sim v1 config=([0-9a-f]{12})$/;

interface Row {
  ebn0_db: number;
  metric: string;
  value: number;
}

/**
 * Parse the long-format simulator CSV.
 *
 * Line 1 pins the format version and the config hash; line 2 is the
 * column header; every following row is (sweep key, metric name, value).
 */
export function parseSimCsv(text: string): SimReport {
  const nl = text.indexOf("\n");
  const m = nl < 0 ? null : HEADER.exec(text.slice(0, nl).trimEnd());
  if (!m) {
    throw new SchemaError("missing '# esrl-sim v1 config=<hash>' header");
  }
  const parsed = parse<Row>(text.slice(nl + 1), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.meta.fields?.join(",") !== "ebn0_db,metric,value") {
    throw new SchemaError(
      `expected columns ebn0_db,metric,value, got ${parsed.meta.fields}`);
  }
  const points = new Map<number, Map<string, number>>();
  const keys: number[] = [];
  for (const row of parsed.data) {
    if (typeof row.ebn0_db !== "number" || !Number.isFinite(row.ebn0_db) ||
        typeof row.value !== "number" || !Number.isFinite(row.value) ||
        typeof row.metric !== "string" || !row.metric) {
      throw new SchemaError(`malformed row ${JSON.stringify(row)}`);
    }
    let metrics = points.get(row.ebn0_db);
    if (!metrics) {
      metrics = new Map();
      points.set(row.ebn0_db, metrics);
      keys.push(row.ebn0_db);
    }
    metrics.set(row.metric, row.value);
  }
  if (keys.length === 0) {
    throw new SchemaError("report has no data rows");
  }
  return { configHash: m[1], points, keys };
}

/** Metric value for a sweep key, or an error naming what is missing. */
export function need(report: SimReport, key: number, metric: string): number {
  const v = report.points.get(key)?.get(metric);
  if (v === undefined) {
    throw new SchemaError(`metric '${metric}' missing at key ${key}`);
  }
  return v;
}
