/**
 * Deterministic SVG line charts: fixed styles, fixed number formatting and
 * no timestamps, so identical inputs always produce identical bytes.
 */

export interface Series {
  label: string;
  points: { x: number; y: number }[];
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  logY?: boolean;
  footer?: string;
}

const WIDTH = 760;
const HEIGHT = 440;
const MARGIN = { top: 44, right: 24, bottom: 64, left: 76 };

const PALETTE = [
  "#4361ee",
  "#e63946",
  "#2d6a4f",
  "#f3722c",
  "#7209b7",
  "#118ab2",
  "#6a4c31",
  "#444444",
];

function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  const s = v.toPrecision(8);
  return s.includes(".") || s.includes("e")
    ? s.replace(/\.?0+(e|$)/, "$1")
    : s;
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1).replace("e+", "e");
  const s = v.toPrecision(4);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

/** Round tick steps to 1/2/5 times a power of ten. */
function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const rawStep = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => (hi - lo) / s <= count) ?? candidates[3];
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(lo); e <= Math.floor(hi) + 1e-9; e += 1) {
    ticks.push(e);
  }
  return ticks.length > 0 ? ticks : [lo, hi];
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderChart(opts: ChartOptions): string {
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const series = opts.logY
    ? opts.series.map((s) => ({
        label: s.label,
        points: s.points.filter((p) => p.y > 0),
      }))
    : opts.series;

  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ysRaw = series.flatMap((s) => s.points.map((p) => p.y));
  const ys = opts.logY ? ysRaw.map((y) => Math.log10(y)) : ysRaw;
  if (xs.length === 0) {
    throw new Error("nothing to plot: every series is empty");
  }

  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  if (xLo === xHi) {
    xLo -= 0.5;
    xHi += 0.5;
  }
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (yLo === yHi) {
    yLo -= 0.5;
    yHi += 0.5;
  }
  const yPad = 0.05 * (yHi - yLo);
  yLo -= yPad;
  yHi += yPad;

  const sx = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const syLin = (y: number) => MARGIN.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;
  const sy = (y: number) => syLin(opts.logY ? Math.log10(y) : y);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">` +
      `${escapeXml(opts.title)}</text>`,
  );

  const xTicks = niceTicks(xLo, xHi);
  const yTicks = opts.logY ? logTicks(yLo, yHi) : niceTicks(yLo, yHi);
  for (const t of xTicks) {
    const px = fmt(sx(t));
    parts.push(
      `<line x1="${px}" y1="${MARGIN.top}" x2="${px}" y2="${MARGIN.top + plotH}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" font-size="11">` +
        `${fmtTick(t)}</text>`,
    );
  }
  for (const t of yTicks) {
    const py = fmt(syLin(t));
    const label = opts.logY ? `1e${fmtTick(t)}` : fmtTick(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${py}" x2="${MARGIN.left + plotW}" y2="${py}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${py}" text-anchor="end" dominant-baseline="middle" ` +
        `font-size="11">${label}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#333333" stroke-width="1"/>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.points
      .slice()
      .sort((a, b) => a.x - b.x)
      .map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`);
    if (pts.length > 1) {
      parts.push(
        `<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="1.6"/>`,
      );
    }
    for (const p of pts) {
      const [cx, cy] = p.split(",");
      parts.push(`<circle cx="${cx}" cy="${cy}" r="2.4" fill="${color}"/>`);
    }
    const ly = MARGIN.top + 14 + 16 * i;
    const lx = MARGIN.left + plotW - 150;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" ` +
        `stroke="${color}" stroke-width="1.6"/>`,
    );
    parts.push(
      `<text x="${lx + 28}" y="${ly}" font-size="12">${escapeXml(s.label)}</text>`,
    );
  });

  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 22}" text-anchor="middle" ` +
      `font-size="13">${escapeXml(opts.xLabel)}</text>`,
  );
  parts.push(
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${escapeXml(opts.yLabel)}</text>`,
  );
  if (opts.footer) {
    parts.push(
      `<text x="${WIDTH - 8}" y="${HEIGHT - 6}" text-anchor="end" font-size="9" ` +
        `fill="#888888">${escapeXml(opts.footer)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
