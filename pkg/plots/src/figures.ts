/** The four figure kinds rendered from harness artifacts. */

import { readdirSync, existsSync, readFileSync } from "node:fs";
import { join } from "node:path";

import { BLACK, BLUE, Canvas, Color, GRAY, GREEN, ORANGE, RED } from "./canvas.js";
import { readTable, requireColumns, Table } from "./csv.js";

export const KNOWN_SCHEMA_VERSION = 1;

export interface FigureSpec {
  kind: string;
  inputDir: string;
  outFile: string;
  logY?: boolean;
  width?: number;
  height?: number;
}

export const FIGURE_KINDS = [
  "waterfall",
  "dist-vs-time",
  "generation-scaling",
  "compare-hist",
] as const;

export function checkSchema(dir: string): void {
  const p = join(dir, "summary.json");
  if (!existsSync(p)) return; // raw artifact directories carry no summary
  const summary = JSON.parse(readFileSync(p, "utf8"));
  if (summary.schema_version !== KNOWN_SCHEMA_VERSION) {
    throw new Error(
      `${p}: unknown schema version ${summary.schema_version} (expected ${KNOWN_SCHEMA_VERSION})`,
    );
  }
}

function findFile(dir: string, pattern: RegExp): string {
  const hits = readdirSync(dir).filter((f) => pattern.test(f)).sort();
  if (hits.length === 0) {
    throw new Error(`${dir}: no file matching ${pattern}`);
  }
  return join(dir, hits[0]);
}

// ---------------------------------------------------------------------------
// frame helpers
// ---------------------------------------------------------------------------

interface Frame {
  px0: number;
  py0: number;
  px1: number;
  py1: number;
  xmin: number;
  xmax: number;
  ymin: number;
  ymax: number;
  logY: boolean;
}

function makeFrame(
  c: Canvas,
  xs: number[],
  ys: number[],
  logY: boolean,
  pad = 0.06,
): Frame {
  let xmin = Math.min(...xs);
  let xmax = Math.max(...xs);
  let yv = ys;
  if (logY) {
    yv = ys.filter((v) => v > 0).map(Math.log10);
    if (yv.length === 0) throw new Error("log scale requested but no positive values");
  }
  let ymin = Math.min(...yv);
  let ymax = Math.max(...yv);
  if (xmax === xmin) {
    xmax += 1;
    xmin -= 1;
  }
  if (ymax === ymin) {
    ymax += 1;
    ymin -= 1;
  }
  const dx = (xmax - xmin) * pad;
  const dy = (ymax - ymin) * pad;
  return {
    px0: 62,
    py0: 34,
    px1: c.width - 18,
    py1: c.height - 44,
    xmin: xmin - dx,
    xmax: xmax + dx,
    ymin: ymin - dy,
    ymax: ymax + dy,
    logY,
  };
}

function mapX(f: Frame, x: number): number {
  return f.px0 + ((x - f.xmin) / (f.xmax - f.xmin)) * (f.px1 - f.px0);
}

function mapY(f: Frame, y: number): number {
  const v = f.logY ? Math.log10(Math.max(y, 1e-300)) : y;
  return f.py1 - ((v - f.ymin) / (f.ymax - f.ymin)) * (f.py1 - f.py0);
}

function niceTicks(lo: number, hi: number, n = 5): number[] {
  const span = hi - lo;
  const step0 = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= n + 1) ?? mag * 10;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12 * Math.abs(step); v += step) {
    ticks.push(Math.abs(v) < 1e-12 * step ? 0 : v);
  }
  return ticks;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    return parseFloat(v.toPrecision(3)).toString();
  }
  return v.toExponential(1).replace("e", "E");
}

function drawAxes(c: Canvas, f: Frame, title: string, xlabel: string, ylabel: string): void {
  c.rect(f.px0, f.py0, f.px1, f.py1, BLACK);
  for (const t of niceTicks(f.xmin, f.xmax)) {
    const px = mapX(f, t);
    c.line(px, f.py1, px, f.py1 + 4, BLACK);
    const label = fmt(t);
    c.text(px - c.textWidth(label, 1.2) / 2, f.py1 + 8, label, BLACK, 1.2);
  }
  for (const t of niceTicks(f.ymin, f.ymax)) {
    const py = f.py1 - ((t - f.ymin) / (f.ymax - f.ymin)) * (f.py1 - f.py0);
    c.line(f.px0 - 4, py, f.px0, py, BLACK);
    const label = f.logY ? `1E${fmt(t)}` : fmt(t);
    c.text(f.px0 - 8 - c.textWidth(label, 1.1), py - 4, label, BLACK, 1.1);
  }
  c.text((f.px0 + f.px1) / 2 - c.textWidth(title, 1.6) / 2, 10, title, BLACK, 1.6);
  c.text((f.px0 + f.px1) / 2 - c.textWidth(xlabel, 1.3) / 2, c.height - 18, xlabel, BLACK, 1.3);
  c.text(6, f.py0 - 16, ylabel, BLACK, 1.3);
}

// ---------------------------------------------------------------------------
// figure kinds
// ---------------------------------------------------------------------------

function renderWaterfall(spec: FigureSpec): Canvas {
  const path = findFile(spec.inputDir, /^trajectory_.*\.csv$/);
  const t = readTable(path);
  requireColumns(t, ["t", "x", "u"], path);
  const times = t.columns.get("t")!;
  const xs = t.columns.get("x")!;
  const us = t.columns.get("u")!;
  const unique = [...new Set(times)].sort((a, b) => a - b);
  const picked =
    unique.length <= 8
      ? unique
      : Array.from({ length: 8 }, (_, i) => unique[Math.round((i * (unique.length - 1)) / 7)]);
  const offsetStep = 2.4;
  const c = new Canvas(spec.width ?? 640, spec.height ?? 440);
  const allY = picked.flatMap((tv, i) =>
    us.filter((_, k) => times[k] === tv).map((u) => u + i * offsetStep),
  );
  const f = makeFrame(c, xs, allY, false);
  drawAxes(c, f, "PROFILE WATERFALL U(T,X)", "X", "U + OFFSET");
  picked.forEach((tv, i) => {
    const pts: number[][] = [];
    for (let k = 0; k < t.nRows; k++) {
      if (times[k] === tv) pts.push([mapX(f, xs[k]), mapY(f, us[k] + i * offsetStep)]);
    }
    const color: Color = i % 2 === 0 ? BLUE : GREEN;
    c.polyline(pts, color);
    const label = `T=${fmt(tv)}`;
    c.text(f.px1 - c.textWidth(label, 1.1) - 4, mapY(f, 1 + i * offsetStep) - 10, label, GRAY, 1.1);
  });
  return c;
}

function renderDistVsTime(spec: FigureSpec): Canvas {
  const path = findFile(spec.inputDir, /^interface_.*\.csv$/);
  const t = readTable(path);
  requireColumns(t, ["t_rescaled", "eta", "distance", "h1_remainder", "valid"], path);
  const valid = t.columns.get("valid")!;
  const times = t.columns.get("t_rescaled")!.filter((_, i) => valid[i] === 1);
  const dist = t.columns.get("distance")!.filter((_, i) => valid[i] === 1);
  const h1 = t.columns.get("h1_remainder")!.filter((_, i) => valid[i] === 1);
  if (times.length === 0) throw new Error(`${path}: no valid slices`);
  const logY = spec.logY ?? true;
  const c = new Canvas(spec.width ?? 640, spec.height ?? 440);
  const f = makeFrame(c, times, [...dist, ...h1], logY);
  drawAxes(c, f, "DISTANCE TO MANIFOLD VS TIME", "RESCALED TIME", "NORM");
  c.polyline(times.map((tv, i) => [mapX(f, tv), mapY(f, dist[i])]), BLUE);
  c.polyline(times.map((tv, i) => [mapX(f, tv), mapY(f, h1[i])]), ORANGE);
  c.text(f.px1 - 150, f.py0 + 8, "L2 DIST", BLUE, 1.3);
  c.text(f.px1 - 150, f.py0 + 22, "H1 REMAINDER", ORANGE, 1.3);
  return c;
}

function renderGenerationScaling(spec: FigureSpec): Canvas {
  const path = findFile(spec.inputDir, /^generation_scaling\.csv$/);
  const t = readTable(path);
  requireColumns(t, ["eps", "t_star"], path);
  const eps = t.columns.get("eps")!;
  const tStar = t.columns.get("t_star")!;
  const xs = eps.map((e) => e * Math.abs(Math.log(e)));
  let sxy = 0;
  let sxx = 0;
  xs.forEach((x, i) => {
    sxy += x * tStar[i];
    sxx += x * x;
  });
  const slope = sxy / sxx;
  const c = new Canvas(spec.width ?? 640, spec.height ?? 440);
  const f = makeFrame(c, [0, ...xs], [0, ...tStar], false);
  drawAxes(c, f, "GENERATION TIME SCALING", "EPS*|LOG EPS|", "T*");
  c.line(mapX(f, 0), mapY(f, 0), mapX(f, f.xmax), mapY(f, slope * f.xmax), RED);
  xs.forEach((x, i) => c.marker(mapX(f, x), mapY(f, tStar[i]), BLUE, 3));
  c.text(f.px0 + 12, f.py0 + 10, `C = ${fmt(slope)}`, RED, 1.5);
  return c;
}

function renderCompareHist(spec: FigureSpec): Canvas {
  const samplesPath = findFile(spec.inputDir, /^compare_samples_.*\.csv$/);
  const slicesPath = findFile(spec.inputDir, /^compare_slices_.*\.csv$/);
  const samples = readTable(samplesPath);
  requireColumns(samples, ["t_rescaled", "source", "value"], samplesPath);
  const slices = readTable(slicesPath);
  requireColumns(slices, ["t_rescaled", "ks_stat"], slicesPath);
  const times = samples.columns.get("t_rescaled")!;
  const sources = samples.raw.get("source")!;
  const values = samples.columns.get("value")!;
  const unique = [...new Set(times)].sort((a, b) => a - b);
  const nPanels = Math.min(4, unique.length);
  const picked = Array.from(
    { length: nPanels },
    (_, i) => unique[Math.round((i * (unique.length - 1)) / Math.max(nPanels - 1, 1))],
  );
  const width = spec.width ?? 900;
  const height = spec.height ?? 320;
  const c = new Canvas(width, height);
  const panelW = Math.floor((width - 40) / nPanels);
  const ksByTime = new Map<number, number>();
  slices.columns.get("t_rescaled")!.forEach((tv, i) => {
    ksByTime.set(tv, slices.columns.get("ks_stat")![i]);
  });
  picked.forEach((tv, p) => {
    const a = values.filter((_, i) => times[i] === tv && sources[i] === "spde");
    const b = values.filter((_, i) => times[i] === tv && sources[i] === "sde");
    if (a.length === 0 || b.length === 0) {
      throw new Error(`slice t=${tv}: empty sample set`);
    }
    const lo = Math.min(...a, ...b);
    const hi = Math.max(...a, ...b);
    const nBins = 12;
    const binW = (hi - lo) / nBins || 1;
    const ha = new Array(nBins).fill(0);
    const hb = new Array(nBins).fill(0);
    a.forEach((v) => ha[Math.min(nBins - 1, Math.floor((v - lo) / binW))]++);
    b.forEach((v) => hb[Math.min(nBins - 1, Math.floor((v - lo) / binW))]++);
    const peak = Math.max(...ha, ...hb);
    const x0 = 24 + p * panelW;
    const x1 = x0 + panelW - 16;
    const y0 = 40;
    const y1 = height - 34;
    c.rect(x0, y0, x1, y1, BLACK);
    const bw = (x1 - x0) / nBins;
    for (let k = 0; k < nBins; k++) {
      const xa = x0 + k * bw;
      const hA = ((y1 - y0) * ha[k]) / peak;
      const hB = ((y1 - y0) * hb[k]) / peak;
      c.fillRect(xa + 1, y1 - hA, xa + bw / 2 - 1, y1, BLUE);
      c.fillRect(xa + bw / 2 + 1, y1 - hB, xa + bw - 1, y1, ORANGE);
    }
    const ks = ksByTime.get(tv);
    const title = `T=${fmt(tv)} KS=${ks === undefined || Number.isNaN(ks) ? "NA" : fmt(ks)}`;
    c.text(x0 + ((x1 - x0) - c.textWidth(title, 1.2)) / 2, y0 - 16, title, BLACK, 1.2);
  });
  c.text(24, height - 22, "SPDE", BLUE, 1.3);
  c.text(24 + 60, height - 22, "SDE", ORANGE, 1.3);
  c.text(width / 2 - c.textWidth("INTERFACE POSITION HISTOGRAMS PER SLICE", 1.4) / 2, 6,
         "INTERFACE POSITION HISTOGRAMS PER SLICE", BLACK, 1.4);
  return c;
}

export function render(spec: FigureSpec): Canvas {
  checkSchema(spec.inputDir);
  switch (spec.kind) {
    case "waterfall":
      return renderWaterfall(spec);
    case "dist-vs-time":
      return renderDistVsTime(spec);
    case "generation-scaling":
      return renderGenerationScaling(spec);
    case "compare-hist":
      return renderCompareHist(spec);
    default:
      throw new Error(
        `unknown figure kind '${spec.kind}' (known: ${FIGURE_KINDS.join(", ")})`,
      );
  }
}
