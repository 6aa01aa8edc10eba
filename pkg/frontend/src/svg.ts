/** Minimal deterministic SVG chart scaffolding.
 *
 * Everything is emitted as plain text with fixed number formatting, so a
 * rendered chart is byte-stable across runs and hashable for golden tests.
 */

export interface Tick {
  v: number;
  label: string;
}

export interface Scale {
  toPx(v: number): number;
  ticks(): Tick[];
  domain: [number, number];
}

/** Fixed-precision coordinate formatting; avoids "-0" and float noise. */
export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`non-finite coordinate ${x}`);
  const s = x.toPrecision(6);
  const n = parseFloat(s);
  return (Object.is(n, -0) ? 0 : n).toString();
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const mult of [1, 2, 5, 10]) {
    if (mult * mag >= raw) return mult * mag;
  }
  return 10 * mag;
}

export function linearScale(domain: [number, number],
                            range: [number, number],
                            tickTarget = 6): Scale {
  const [d0, d1] = domain;
  const span = d1 - d0 || 1;
  const toPx = (v: number) =>
    range[0] + ((v - d0) / span) * (range[1] - range[0]);
  const ticks = () => {
    const step = niceStep(span, tickTarget);
    const out: Tick[] = [];
    for (let v = Math.ceil(d0 / step) * step; v <= d1 + 1e-9 * step;
         v += step) {
      const r = Math.round(v / step) * step;
      out.push({ v: r, label: fmt(r) });
    }
    return out;
  };
  return { toPx, ticks, domain };
}

/** Decade-tick log scale; the domain must be strictly positive. */
export function logScale(domain: [number, number],
                         range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) throw new Error("log scale needs positive bounds");
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  const toPx = (v: number) =>
    range[0] + ((Math.log10(v) - l0) / span) * (range[1] - range[0]);
  const ticks = () => {
    const out: Tick[] = [];
    for (let e = Math.ceil(l0 - 1e-9); e <= Math.log10(d1) + 1e-9; e++) {
      out.push({ v: Math.pow(10, e), label: `1e${e}` });
    }
    return out;
  };
  return { toPx, ticks, domain };
}

export function el(tag: string, attrs: Record<string, string | number>,
                   body = ""): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join("");
  return body === "" && tag !== "text"
    ? `<${tag}${a}/>`
    : `<${tag}${a}>${body}</${tag}>`;
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                        "#ff7f0e", "#8c564b"];

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { top: 44, right: 24, bottom: 52, left: 72 };

export interface Frame {
  x: Scale;
  y: Scale;
}

/** Axes, grid lines, tick labels, axis titles and the chart title. */
export function frame(f: Frame, title: string, xLabel: string,
                      yLabel: string): string {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  const parts: string[] = [];
  parts.push(el("rect", { x: 0, y: 0, width: WIDTH, height: HEIGHT,
                          fill: "white" }));
  for (const t of f.x.ticks()) {
    const px = fmt(f.x.toPx(t.v));
    parts.push(el("line", { x1: px, y1: fmt(y0), x2: px, y2: fmt(y1),
                            stroke: "#dddddd" }));
    parts.push(el("text", { x: px, y: fmt(y0 + 18), "text-anchor": "middle",
                            "font-size": 12 }, esc(t.label)));
  }
  for (const t of f.y.ticks()) {
    const py = fmt(f.y.toPx(t.v));
    parts.push(el("line", { x1: fmt(x0), y1: py, x2: fmt(x1), y2: py,
                            stroke: "#dddddd" }));
    parts.push(el("text", { x: fmt(x0 - 8), y: py, "text-anchor": "end",
                            "dominant-baseline": "middle",
                            "font-size": 12 }, esc(t.label)));
  }
  parts.push(el("rect", { x: fmt(x0), y: fmt(y1), width: fmt(x1 - x0),
                          height: fmt(y0 - y1), fill: "none",
                          stroke: "black" }));
  parts.push(el("text", { x: fmt((x0 + x1) / 2), y: fmt(y0 + 38),
                          "text-anchor": "middle", "font-size": 14 },
                esc(xLabel)));
  parts.push(el("text", { x: fmt(x0 - 52), y: fmt((y0 + y1) / 2),
                          "text-anchor": "middle", "font-size": 14,
                          transform:
                            `rotate(-90 ${fmt(x0 - 52)} ${fmt((y0 + y1) / 2)})`,
                        }, esc(yLabel)));
  parts.push(el("text", { x: fmt(WIDTH / 2), y: 24, "text-anchor": "middle",
                          "font-size": 16 }, esc(title)));
  return parts.join("\n");
}

/** Clip a value into the scale's domain so log plots stay drawable. */
export function clamp(s: Scale, v: number): number {
  return Math.min(Math.max(v, s.domain[0]), s.domain[1]);
}

export function linePath(f: Frame, pts: Array<[number, number]>): string {
  return pts
    .map(([x, y], i) =>
      `${i ? "L" : "M"}${fmt(f.x.toPx(x))} ${fmt(f.y.toPx(clamp(f.y, y)))}`)
    .join(" ");
}

export function bandPath(f: Frame,
                         pts: Array<[number, number, number]>): string {
  const upper = pts.map(([x, , hi]) =>
    `${fmt(f.x.toPx(x))} ${fmt(f.y.toPx(clamp(f.y, hi)))}`);
  const lower = [...pts].reverse().map(([x, lo]) =>
    `${fmt(f.x.toPx(x))} ${fmt(f.y.toPx(clamp(f.y, lo)))}`);
  return `M${[...upper, ...lower].join(" L")} Z`;
}

export function legend(labels: string[], colors: string[]): string {
  const x = WIDTH - MARGIN.right - 200;
  const parts: string[] = [];
  parts.push(el("rect", { x: fmt(x), y: fmt(MARGIN.top + 8), width: 196,
                          height: fmt(labels.length * 18 + 10),
                          fill: "white", stroke: "#999999" }));
  labels.forEach((label, i) => {
    const y = MARGIN.top + 22 + i * 18;
    parts.push(el("line", { x1: fmt(x + 8), y1: fmt(y), x2: fmt(x + 30),
                            y2: fmt(y), stroke: colors[i],
                            "stroke-width": 2 }));
    parts.push(el("text", { x: fmt(x + 36), y: fmt(y),
                            "dominant-baseline": "middle",
                            "font-size": 12 }, esc(label)));
  });
  return parts.join("\n");
}

export function document(body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}"`,
    ` height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}"`,
    ` font-family="Helvetica, Arial, sans-serif">\n`,
    body,
    "\n</svg>\n",
  ].join("");
}
