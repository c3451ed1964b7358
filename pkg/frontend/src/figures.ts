/**
 * Figure presets: which aggregate CSVs each figure reads and how their
 * columns map onto panels. Rendering is a pure function of the CSV bytes,
 * so re-rendering unchanged inputs reproduces identical SVG bytes.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { parseCsv, requireColumns, Table } from "./csv.js";
import { renderBarChart, renderChart, Series } from "./svg.js";

export const AGG_COLUMNS = [
  "bin_center_m",
  "mean_completion_s",
  "mean_activity_s",
  "mean_energy_J",
  "n",
];

export const ENERGY_COLUMNS = [
  "scheme",
  "label",
  "tx_energy_J",
  "rx_energy_J",
  "total_energy_J",
];

export const PRESETS = ["fig3", "fig4", "fig5", "fig6", "table2"] as const;
export type Preset = (typeof PRESETS)[number];

function loadAggregate(file: string): Table {
  if (!fs.existsSync(file)) {
    throw new Error(
      `missing input ${file}; expected an aggregate CSV with columns: ` +
        AGG_COLUMNS.join(", "),
    );
  }
  const table = parseCsv(fs.readFileSync(file, "utf8"));
  requireColumns(file, table, AGG_COLUMNS);
  return table;
}

/** (distance, value) points of one aggregate column, skipping empty bins. */
function distanceSeries(table: Table, column: string): [number, number][] {
  const points: [number, number][] = [];
  for (const row of table.rows) {
    const x = row["bin_center_m"];
    const y = row[column];
    if (row["n"] && x != null && y != null) {
      points.push([x, y]);
    }
  }
  return points;
}

/** Outermost bin that actually holds samples with a value in `column`. */
function cellEdge(table: Table, column: string): number | null {
  for (let i = table.rows.length - 1; i >= 0; i--) {
    const row = table.rows[i]!;
    const value = row[column];
    if (row["n"] && value != null) {
      return value;
    }
  }
  return null;
}

function writeSvg(outDir: string, name: string, svg: string): string {
  const file = path.join(outDir, name);
  fs.writeFileSync(file, svg);
  return file;
}

function schemeComparison(
  inDir: string,
  outDir: string,
  prefix: string,
  schemes: string[],
  panels: { column: string; title: string; yLabel: string; out: string; logY: boolean }[],
): string[] {
  const tables = schemes.map((scheme) => ({
    scheme,
    table: loadAggregate(path.join(inDir, `${prefix}_${scheme}_agg.csv`)),
  }));
  return panels.map((panel) => {
    const series: Series[] = tables
      .map(({ scheme, table }) => ({
        label: scheme,
        points: distanceSeries(table, panel.column),
      }))
      .filter((s) => s.points.length > 0);
    const svg = renderChart({
      title: panel.title,
      xLabel: "distance from gateway (m)",
      yLabel: panel.yLabel,
      series,
      logY: panel.logY,
    });
    return writeSvg(outDir, panel.out, svg);
  });
}

function renderFig3(inDir: string, outDir: string): string[] {
  return schemeComparison(
    inDir,
    outDir,
    "fig3",
    ["d2d", "d2d-psi", "fsf-12", "fsf-9", "gl-msf"],
    [
      {
        column: "mean_completion_s",
        title: "Average completion time vs distance",
        yLabel: "completion time (s)",
        out: "fig3_completion.svg",
        logY: true,
      },
      {
        column: "mean_activity_s",
        title: "Average device activity time vs distance",
        yLabel: "activity time (s)",
        out: "fig3_activity.svg",
        logY: true,
      },
    ],
  );
}

function renderFig4(inDir: string, outDir: string): string[] {
  const sStars = [1, 2, 5, 10, 20];
  const nEds = [200, 400, 600];
  const panels = [
    {
      column: "mean_completion_s",
      title: "Cell-edge completion time vs S*",
      yLabel: "completion time (s)",
      out: "fig4_completion.svg",
    },
    {
      column: "mean_activity_s",
      title: "Cell-edge activity time vs S*",
      yLabel: "activity time (s)",
      out: "fig4_activity.svg",
    },
  ];
  return panels.map((panel) => {
    const series: Series[] = nEds.map((n) => {
      const points: [number, number][] = [];
      for (const s of sStars) {
        const file = path.join(
          inDir,
          `fig4_d2d_s_star=${s}_n_ed=${n}_agg.csv`,
        );
        const value = cellEdge(loadAggregate(file), panel.column);
        if (value !== null) {
          points.push([s, value]);
        }
      }
      return { label: `${n} EDs`, points };
    });
    const svg = renderChart({
      title: panel.title,
      xLabel: "superslots per D2D window (S*)",
      yLabel: panel.yLabel,
      series: series.filter((s) => s.points.length > 0),
    });
    return writeSvg(outDir, panel.out, svg);
  });
}

function renderFig5(inDir: string, outDir: string): string[] {
  const sfs = [7, 8, 9, 10, 11, 12];
  const panels = [
    {
      column: "mean_completion_s",
      title: "Cell-edge completion time vs D2D SF",
      yLabel: "completion time (s)",
      out: "fig5_completion.svg",
    },
    {
      column: "mean_activity_s",
      title: "Cell-edge activity time vs D2D SF",
      yLabel: "activity time (s)",
      out: "fig5_activity.svg",
    },
  ];
  return panels.map((panel) => {
    const points: [number, number][] = [];
    for (const sf of sfs) {
      const file = path.join(inDir, `fig5_d2d_sf_d2d=${sf}_agg.csv`);
      const value = cellEdge(loadAggregate(file), panel.column);
      if (value !== null) {
        points.push([sf, value]);
      }
    }
    const svg = renderChart({
      title: panel.title,
      xLabel: "D2D spreading factor",
      yLabel: panel.yLabel,
      series: [{ label: "d2d", points }],
    });
    return writeSvg(outDir, panel.out, svg);
  });
}

function renderFig6(inDir: string, outDir: string): string[] {
  return schemeComparison(
    inDir,
    outDir,
    "fig6",
    ["d2d", "fsf-12", "gl-msf"],
    [
      {
        column: "mean_completion_s",
        title: "Batched delivery: completion time vs distance",
        yLabel: "completion time (s)",
        out: "fig6_completion.svg",
        logY: true,
      },
      {
        column: "mean_energy_J",
        title: "Batched delivery: energy vs distance",
        yLabel: "energy (J)",
        out: "fig6_energy.svg",
        logY: true,
      },
    ],
  );
}

function renderTable2(inDir: string, outDir: string): string[] {
  const file = path.join(inDir, "table2_energy.csv");
  if (!fs.existsSync(file)) {
    throw new Error(
      `missing input ${file}; expected an energy table with columns: ` +
        ENERGY_COLUMNS.join(", "),
    );
  }
  const raw = fs.readFileSync(file, "utf8").trim().split(/\r?\n/);
  const header = (raw[0] ?? "").split(",");
  const missing = ENERGY_COLUMNS.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new Error(
      `${file}: missing column(s) ${missing.join(", ")}; expected columns: ` +
        ENERGY_COLUMNS.join(", "),
    );
  }
  const idx = (name: string) => header.indexOf(name);
  const groups = raw.slice(1).map((line) => {
    const cells = line.split(",");
    return {
      label: cells[idx("scheme")] ?? "?",
      values: [
        Number(cells[idx("tx_energy_J")]),
        Number(cells[idx("rx_energy_J")]),
        Number(cells[idx("total_energy_J")]),
      ],
    };
  });
  const svg = renderBarChart({
    title: "Cell-edge energy decomposition (batched delivery)",
    yLabel: "energy (J)",
    categories: ["transmission", "reception", "total"],
    groups,
  });
  return [writeSvg(outDir, "table2_energy.svg", svg)];
}

export function renderPreset(
  preset: string,
  inDir: string,
  outDir: string,
): string[] {
  fs.mkdirSync(outDir, { recursive: true });
  switch (preset) {
    case "fig3":
      return renderFig3(inDir, outDir);
    case "fig4":
      return renderFig4(inDir, outDir);
    case "fig5":
      return renderFig5(inDir, outDir);
    case "fig6":
      return renderFig6(inDir, outDir);
    case "table2":
      return renderTable2(inDir, outDir);
    default:
      throw new Error(
        `unknown preset "${preset}"; expected one of ${PRESETS.join(", ")}`,
      );
  }
}
