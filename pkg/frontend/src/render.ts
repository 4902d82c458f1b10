/**
 * Figure definitions over the sampler's CSV schemas: which columns each
 * figure kind needs, how rows group into curves, and the axis labels.
 */

import { createHash } from "crypto";
import { readFile, writeFile } from "fs/promises";

import { renderChart, Series } from "./chart.js";
import { CsvError, CsvTable, numeric, parseCsv, requireColumns } from "./csv.js";

export type FigureKind = "gap_vs_u" | "gap_vs_n" | "slope_vs_n" | "atomic_gap";

export interface PlotSpec {
  kind: FigureKind;
  input: string;
  output: string;
  logY?: boolean;
}

interface KindDef {
  x: string;
  y: string;
  groupBy: string | null;
  required: string[];
  title: string;
  xLabel: string;
  yLabel: string;
}

const KINDS: Record<FigureKind, KindDef> = {
  gap_vs_u: {
    x: "u",
    y: "delta",
    groupBy: "n",
    required: ["u", "delta", "n"],
    title: "Spectral gap vs interaction strength",
    xLabel: "interaction strength u",
    yLabel: "gap",
  },
  gap_vs_n: {
    x: "n",
    y: "delta",
    groupBy: "u",
    required: ["n", "delta", "u"],
    title: "Spectral gap vs system size",
    xLabel: "sites n",
    yLabel: "gap",
  },
  slope_vs_n: {
    x: "n",
    y: "d_plus",
    groupBy: "beta",
    required: ["n", "d_plus", "beta"],
    title: "Gap slope at u = 0 vs system size",
    xLabel: "sites n",
    yLabel: "slope d+",
  },
  atomic_gap: {
    x: "u",
    y: "delta",
    groupBy: "beta",
    required: ["u", "delta"],
    title: "Single-site gap of the no-hopping sampler",
    xLabel: "interaction strength u",
    yLabel: "gap",
  },
};

export function figureKinds(): FigureKind[] {
  return Object.keys(KINDS) as FigureKind[];
}

function seriesFromTable(table: CsvTable, def: KindDef): Series[] {
  let rows = table.rows;
  if (table.columns.includes("status")) {
    rows = rows.filter((r) => r.status === "ok");
  }
  if (rows.length === 0) {
    throw new CsvError("no rows");
  }
  const groups = new Map<string, Series>();
  const canGroup = def.groupBy !== null && table.columns.includes(def.groupBy);
  for (const row of rows) {
    const key = canGroup ? `${def.groupBy}=${row[def.groupBy as string]}` : "all rows";
    let s = groups.get(key);
    if (!s) {
      s = { label: key, points: [] };
      groups.set(key, s);
    }
    s.points.push({ x: numeric(row, def.x), y: numeric(row, def.y) });
  }
  return [...groups.values()];
}

export function renderFigure(csvText: string, spec: PlotSpec): string {
  const def = KINDS[spec.kind];
  if (!def) {
    throw new CsvError(`unknown figure kind ${spec.kind}`);
  }
  const table = parseCsv(csvText);
  requireColumns(table, def.required);
  const series = seriesFromTable(table, def);
  const hash = createHash("sha256").update(csvText).digest("hex").slice(0, 12);
  return renderChart({
    title: def.title,
    xLabel: def.xLabel,
    yLabel: def.yLabel,
    series,
    logY: spec.logY,
    footer: `source ${hash}`,
  });
}

export async function render(spec: PlotSpec): Promise<void> {
  if (!spec.output.endsWith(".svg")) {
    throw new CsvError(
      "only .svg output is supported (deterministic bytes; no rasteriser dependency)",
    );
  }
  const csvText = await readFile(spec.input, "utf-8");
  const svg = renderFigure(csvText, spec);
  await writeFile(spec.output, svg);
}
