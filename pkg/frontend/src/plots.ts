import { readFileSync, renameSync, writeFileSync } from "node:fs";

import { need, parseSimCsv, SimReport } from "./schema.js";
import {
  bandPath,
  document as svgDocument,
  el,
  fmt,
  Frame,
  frame,
  legend,
  linePath,
  linearScale,
  logScale,
  MARGIN,
  HEIGHT,
  PALETTE,
  WIDTH,
} from "./svg.js";

export interface SeriesInput {
  path: string;
  label: string;
}

export interface PlotSpec {
  inputs: SeriesInput[];
  out: string;
  title?: string;
  xRange?: [number, number];
  yRange?: [number, number];
}

interface Series {
  label: string;
  report: SimReport;
}

function loadSeries(spec: PlotSpec): Series[] {
  if (spec.inputs.length === 0) throw new Error("at least one CSV required");
  return spec.inputs.map((inp) => ({
    label: inp.label,
    report: parseSimCsv(readFileSync(inp.path, "ascii")),
  }));
}

function write(out: string, svg: string): void {
  const tmp = `${out}.tmp`;
  writeFileSync(tmp, svg, "ascii");
  renameSync(tmp, out);
}

function pad([lo, hi]: [number, number], frac = 0.03): [number, number] {
  const d = (hi - lo || 1) * frac;
  return [lo - d, hi + d];
}

function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}

const PX_X: [number, number] = [MARGIN.left, WIDTH - MARGIN.right];
const PX_Y: [number, number] = [HEIGHT - MARGIN.bottom, MARGIN.top];

function markers(f: Frame, pts: Array<[number, number]>,
                 color: string): string {
  return pts
    .map(([x, y]) => el("circle", {
      cx: fmt(f.x.toPx(x)),
      cy: fmt(f.y.toPx(Math.min(Math.max(y, f.y.domain[0]), f.y.domain[1]))),
      r: 3.5, fill: color,
    }))
    .join("\n");
}

/** FER versus Eb/N0, log-scale FER with shaded binomial confidence band. */
export function plotFer(spec: PlotSpec): string {
  const series = loadSeries(spec);
  const rows = series.map((s) => {
    const keys = [...s.report.keys].sort((a, b) => a - b);
    return keys.map((k) => {
      const fer = need(s.report, k, "fer");
      const metrics = s.report.points.get(k)!;
      return [k, fer, metrics.get("fer_lo") ?? fer,
              metrics.get("fer_hi") ?? fer] as const;
    });
  });
  const xs = rows.flat().map((r) => r[0]);
  const positives = rows.flat().flatMap((r) => r.slice(1).filter((v) => v > 0));
  const yHi = positives.length ? Math.max(...positives) : 1;
  const yLo = positives.length ? Math.min(...positives) : 1e-6;
  const yDomain: [number, number] = spec.yRange ?? [
    Math.pow(10, Math.floor(Math.log10(yLo))),
    Math.pow(10, Math.ceil(Math.log10(yHi)) || 1),
  ];
  const f: Frame = {
    x: linearScale(spec.xRange ?? pad(extent(xs)), PX_X),
    y: logScale(yDomain[0] < yDomain[1] ? yDomain
                                        : [yDomain[0] / 10, yDomain[1]], PX_Y),
  };
  const parts = [frame(f, spec.title ?? "Frame error rate", "Eb/N0 (dB)",
                       "FER")];
  rows.forEach((pts, i) => {
    const color = PALETTE[i % PALETTE.length];
    const floor = f.y.domain[0];
    // zero-FER points have no log-scale position; pin them to the floor
    const safe: Array<[number, number, number, number]> =
      pts.map(([x, fer, lo, hi]) =>
        [x, fer > 0 ? fer : floor, lo > 0 ? lo : floor,
         hi > 0 ? hi : floor]);
    parts.push(el("path", {
      d: bandPath(f, safe.map(([x, , lo, hi]) => [x, lo, hi])),
      fill: color, "fill-opacity": "0.15", stroke: "none",
    }));
    parts.push(el("path", {
      d: linePath(f, safe.map(([x, y]) => [x, y])),
      fill: "none", stroke: color, "stroke-width": 2,
    }));
    parts.push(markers(f, safe.map(([x, y]) => [x, y]), color));
  });
  parts.push(legend(series.map((s) => s.label), PALETTE));
  const svg = svgDocument(parts.join("\n"));
  write(spec.out, svg);
  return svg;
}

/** Decoding threshold versus code rate, one curve per sweep CSV. */
export function plotThreshold(spec: PlotSpec): string {
  const series = loadSeries(spec);
  const rows = series.map((s) =>
    s.report.keys
      .map((k) => [need(s.report, k, "rate"),
                   need(s.report, k, "threshold_db")] as [number, number])
      .sort((a, b) => a[0] - b[0]));
  const flat = rows.flat();
  const f: Frame = {
    x: linearScale(spec.xRange ?? pad(extent(flat.map((p) => p[0]))), PX_X),
    y: linearScale(spec.yRange ?? pad(extent(flat.map((p) => p[1])), 0.08),
                   PX_Y),
  };
  const parts = [frame(f, spec.title ?? "Decoding thresholds", "Code rate",
                       "Threshold Eb/N0 (dB)")];
  rows.forEach((pts, i) => {
    const color = PALETTE[i % PALETTE.length];
    parts.push(el("path", { d: linePath(f, pts), fill: "none", stroke: color,
                            "stroke-width": 2 }));
    parts.push(markers(f, pts, color));
  });
  parts.push(legend(series.map((s) => s.label), PALETTE));
  const svg = svgDocument(parts.join("\n"));
  write(spec.out, svg);
  return svg;
}

/** Retransmission system rate versus Eb/N0 of the first transmission. */
export function plotHarq(spec: PlotSpec): string {
  const series = loadSeries(spec);
  const rows = series.map((s) =>
    [...s.report.keys]
      .sort((a, b) => a - b)
      .map((k) => [k, need(s.report, k, "system_rate")] as [number, number]));
  const flat = rows.flat();
  const f: Frame = {
    x: linearScale(spec.xRange ?? pad(extent(flat.map((p) => p[0]))), PX_X),
    y: linearScale(spec.yRange ??
                   pad([0, Math.max(...flat.map((p) => p[1]))], 0.05), PX_Y),
  };
  const parts = [frame(f, spec.title ?? "Retransmission system rate",
                       "Eb/N0 of first transmission (dB)", "System rate")];
  rows.forEach((pts, i) => {
    const color = PALETTE[i % PALETTE.length];
    parts.push(el("path", { d: linePath(f, pts), fill: "none", stroke: color,
                            "stroke-width": 2 }));
    parts.push(markers(f, pts, color));
  });
  parts.push(legend(series.map((s) => s.label), PALETTE));
  const svg = svgDocument(parts.join("\n"));
  write(spec.out, svg);
  return svg;
}
