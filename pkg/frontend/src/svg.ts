/**
 * Deterministic SVG assembly: identical inputs produce identical bytes.
 * Only the primitives the figure set needs: framed axes, marker series,
 * grouped bars, and a legend.
 */

import { Scale, linearScale, logScale } from "./scale.js";

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
];

const MARKERS = ["circle", "square", "diamond", "triangle", "cross", "circle"];

export interface Series {
  label: string;
  points: [number, number][];
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  logY?: boolean;
  width?: number;
  height?: number;
}

const M = { top: 34, right: 16, bottom: 44, left: 64 };

function fmt(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 10000 || abs < 0.01) {
    return value.toExponential(0).replace("+", "");
  }
  return String(Number(value.toPrecision(6)));
}

function marker(kind: string, x: number, y: number, color: string): string {
  const r = 3.2;
  const p = (v: number) => Number(v.toFixed(2));
  switch (kind) {
    case "square":
      return `<rect x="${p(x - r)}" y="${p(y - r)}" width="${p(2 * r)}" height="${p(2 * r)}" fill="${color}"/>`;
    case "diamond":
      return `<path d="M${p(x)} ${p(y - r)}L${p(x + r)} ${p(y)}L${p(x)} ${p(y + r)}L${p(x - r)} ${p(y)}Z" fill="${color}"/>`;
    case "triangle":
      return `<path d="M${p(x)} ${p(y - r)}L${p(x + r)} ${p(y + r)}L${p(x - r)} ${p(y + r)}Z" fill="${color}"/>`;
    case "cross":
      return `<path d="M${p(x - r)} ${p(y)}H${p(x + r)}M${p(x)} ${p(y - r)}V${p(y + r)}" stroke="${color}" stroke-width="1.6"/>`;
    default:
      return `<circle cx="${p(x)}" cy="${p(y)}" r="${r}" fill="${color}"/>`;
  }
}

function axes(x: Scale, y: Scale, w: number, h: number, spec: ChartSpec): string {
  const parts: string[] = [];
  parts.push(
    `<rect x="${M.left}" y="${M.top}" width="${w - M.left - M.right}" height="${h - M.top - M.bottom}" fill="none" stroke="#333"/>`,
  );
  for (const t of x.ticks) {
    const px = Number(x(t).toFixed(2));
    parts.push(
      `<line x1="${px}" y1="${h - M.bottom}" x2="${px}" y2="${h - M.bottom + 4}" stroke="#333"/>`,
      `<text x="${px}" y="${h - M.bottom + 16}" font-size="10" text-anchor="middle">${fmt(t)}</text>`,
    );
  }
  for (const t of y.ticks) {
    const py = Number(y(t).toFixed(2));
    parts.push(
      `<line x1="${M.left - 4}" y1="${py}" x2="${M.left}" y2="${py}" stroke="#333"/>`,
      `<text x="${M.left - 7}" y="${py + 3}" font-size="10" text-anchor="end">${fmt(t)}</text>`,
      `<line x1="${M.left}" y1="${py}" x2="${w - M.right}" y2="${py}" stroke="#ddd" stroke-width="0.5"/>`,
    );
  }
  parts.push(
    `<text x="${(M.left + w - M.right) / 2}" y="${h - 8}" font-size="11" text-anchor="middle">${spec.xLabel}</text>`,
    `<text x="14" y="${(M.top + h - M.bottom) / 2}" font-size="11" text-anchor="middle" transform="rotate(-90 14 ${(M.top + h - M.bottom) / 2})">${spec.yLabel}</text>`,
    `<text x="${(M.left + w - M.right) / 2}" y="18" font-size="12" font-weight="bold" text-anchor="middle">${spec.title}</text>`,
  );
  return parts.join("\n");
}

/** Line-and-marker chart; series with a single point render as a marker. */
export function renderChart(spec: ChartSpec): string {
  const w = spec.width ?? 460;
  const h = spec.height ?? 320;
  const pts = spec.series.flatMap((s) => s.points);
  if (pts.length === 0) {
    throw new Error(`figure "${spec.title}" has no data points`);
  }
  const xs = pts.map(([px]) => px);
  const ys = pts.map(([, py]) => py);
  const x = linearScale(
    [Math.min(...xs), Math.max(...xs)],
    [M.left, w - M.right],
  );
  const yDomain: [number, number] = [Math.min(...ys), Math.max(...ys)];
  const y = spec.logY
    ? logScale(yDomain, [h - M.bottom, M.top])
    : linearScale(
        [yDomain[0] > 0 ? 0 : yDomain[0], yDomain[1]],
        [h - M.bottom, M.top],
      );
  const body: string[] = [axes(x, y, w, h, spec)];
  spec.series.forEach((series, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const kind = MARKERS[i % MARKERS.length]!;
    const coords = series.points.map(
      ([px, py]) => [Number(x(px).toFixed(2)), Number(y(py).toFixed(2))] as const,
    );
    if (coords.length > 1) {
      const path = coords.map(([px, py]) => `${px},${py}`).join(" ");
      body.push(
        `<polyline points="${path}" fill="none" stroke="${color}" stroke-width="1.5"/>`,
      );
    }
    for (const [px, py] of coords) {
      body.push(marker(kind, px, py, color));
    }
    const ly = M.top + 14 + i * 15;
    body.push(
      `<line x1="${w - M.right - 108}" y1="${ly - 3}" x2="${w - M.right - 88}" y2="${ly - 3}" stroke="${color}" stroke-width="1.5"/>`,
      marker(kind, w - M.right - 98, ly - 3, color),
      `<text x="${w - M.right - 84}" y="${ly}" font-size="10">${series.label}</text>`,
    );
  });
  return svgDocument(w, h, body.join("\n"));
}

export interface BarGroup {
  label: string;
  values: number[]; // one per category
}

export interface BarChartSpec {
  title: string;
  yLabel: string;
  categories: string[];
  groups: BarGroup[];
  width?: number;
  height?: number;
}

/** Grouped bar chart (used for the cell-edge energy decomposition). */
export function renderBarChart(spec: BarChartSpec): string {
  const w = spec.width ?? 460;
  const h = spec.height ?? 320;
  const maxVal = Math.max(...spec.groups.flatMap((g) => g.values));
  const y = linearScale([0, maxVal], [h - M.bottom, M.top]);
  const innerW = w - M.left - M.right;
  const groupW = innerW / spec.groups.length;
  const barW = (groupW * 0.72) / spec.categories.length;
  const body: string[] = [];
  body.push(
    `<rect x="${M.left}" y="${M.top}" width="${innerW}" height="${h - M.top - M.bottom}" fill="none" stroke="#333"/>`,
  );
  for (const t of y.ticks) {
    const py = Number(y(t).toFixed(2));
    body.push(
      `<text x="${M.left - 7}" y="${py + 3}" font-size="10" text-anchor="end">${fmt(t)}</text>`,
      `<line x1="${M.left}" y1="${py}" x2="${w - M.right}" y2="${py}" stroke="#ddd" stroke-width="0.5"/>`,
    );
  }
  spec.groups.forEach((group, gi) => {
    const gx = M.left + gi * groupW + groupW * 0.14;
    group.values.forEach((value, ci) => {
      const bx = Number((gx + ci * barW).toFixed(2));
      const by = Number(y(value).toFixed(2));
      const bh = Number((h - M.bottom - y(value)).toFixed(2));
      body.push(
        `<rect x="${bx}" y="${by}" width="${Number(barW.toFixed(2))}" height="${bh}" fill="${PALETTE[ci % PALETTE.length]}"/>`,
      );
    });
    body.push(
      `<text x="${Number((M.left + gi * groupW + groupW / 2).toFixed(2))}" y="${h - M.bottom + 16}" font-size="10" text-anchor="middle">${group.label}</text>`,
    );
  });
  spec.categories.forEach((cat, ci) => {
    const ly = M.top + 14 + ci * 15;
    body.push(
      `<rect x="${w - M.right - 104}" y="${ly - 9}" width="9" height="9" fill="${PALETTE[ci % PALETTE.length]}"/>`,
      `<text x="${w - M.right - 91}" y="${ly}" font-size="10">${cat}</text>`,
    );
  });
  body.push(
    `<text x="${(M.left + w - M.right) / 2}" y="18" font-size="12" font-weight="bold" text-anchor="middle">${spec.title}</text>`,
    `<text x="14" y="${(M.top + h - M.bottom) / 2}" font-size="11" text-anchor="middle" transform="rotate(-90 14 ${(M.top + h - M.bottom) / 2})">${spec.yLabel}</text>`,
  );
  return svgDocument(w, h, body.join("\n"));
}

function svgDocument(w: number, h: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${w}" height="${h}" ` +
    `viewBox="0 0 ${w} ${h}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${w}" height="${h}" fill="white"/>\n${body}\n</svg>\n`
  );
}
