/**
 * SVG chart renderer: one line per mechanism, x = endowment cap (log scale by
 * default), y = mean marginal approximation ratio on a fixed [0, 1] axis,
 * vertical ticks of +/- one standard error at every point.
 *
 * Output is pure SVG text generated from the data alone (fixed canvas, fixed
 * fonts, no timestamps or ids), so rendering the same CSV twice yields
 * byte-identical files.
 */

import { AggRow, groupByMechanism } from "./csv.js";

export interface LineStyle {
  color: string;
  dash: string; // SVG stroke-dasharray, "" for solid
}

export const DEFAULT_STYLES: Record<string, LineStyle> = {
  CEN: { color: "#1f77b4", dash: "" },
  DEC: { color: "#d62728", dash: "" },
  "CEN+3R": { color: "#2ca02c", dash: "6 3" },
  "RAND+3R": { color: "#9467bd", dash: "2 3" },
};

const FALLBACK_COLORS = ["#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"];

export interface PlotSpec {
  title?: string;
  logX: boolean;
  mechanisms?: string[]; // plot everything in the CSV unless filtered
  styles?: Record<string, LineStyle>;
}

const WIDTH = 760;
const HEIGHT = 480;
const MARGIN = { left: 64, right: 24, top: 40, bottom: 56 };

function fmtNum(x: number): string {
  // fixed, locale-independent coordinate formatting
  return x.toFixed(2).replace(/\.?0+$/, "") || "0";
}

function fmtTick(x: number): string {
  if (x >= 10000) {
    const exp = Math.round(Math.log10(x));
    if (Math.abs(x - 10 ** exp) < 1e-9) return `1e${exp}`;
  }
  return String(x);
}

export function render(rows: AggRow[], spec: PlotSpec): string {
  const series = groupByMechanism(rows);
  const wanted = spec.mechanisms ?? [...series.keys()];
  for (const mech of wanted) {
    if (!series.has(mech)) {
      throw new Error(`mechanism ${mech} not present in CSV`);
    }
  }
  const xsAll = [...new Set(rows.map((r) => r.eMax))].sort((a, b) => a - b);
  if (spec.logX && xsAll[0] <= 0) {
    throw new Error("log-scale x requires positive e_max values");
  }
  const xMin = spec.logX ? Math.log10(xsAll[0]) : xsAll[0];
  const xMax = spec.logX
    ? Math.log10(xsAll[xsAll.length - 1])
    : xsAll[xsAll.length - 1];
  const span = xMax - xMin || 1;
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const px = (eMax: number) => {
    const v = spec.logX ? Math.log10(eMax) : eMax;
    return MARGIN.left + ((v - xMin) / span) * plotW;
  };
  // y axis fixed to the ratio range [0, 1]
  const py = (ratio: number) => MARGIN.top + (1 - ratio) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  if (spec.title) {
    parts.push(
      `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">${escapeXml(spec.title)}</text>`,
    );
  }

  // frame and y grid
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  for (let i = 0; i <= 5; i++) {
    const ratio = i / 5;
    const y = py(ratio);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmtNum(y)}" x2="${MARGIN.left + plotW}" y2="${fmtNum(y)}" stroke="#ddd" stroke-width="0.5"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${fmtNum(y + 4)}" text-anchor="end" font-size="11">${ratio.toFixed(1)}</text>`,
    );
  }
  for (const x of xsAll) {
    const xs = px(x);
    parts.push(
      `<line x1="${fmtNum(xs)}" y1="${MARGIN.top + plotH}" x2="${fmtNum(xs)}" y2="${MARGIN.top + plotH + 4}" stroke="#333" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmtNum(xs)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" font-size="10">${fmtTick(x)}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="12">largest possible endowment</text>`,
  );
  parts.push(
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">marginal approximation ratio</text>`,
  );

  let fallbackIdx = 0;
  wanted.forEach((mech, order) => {
    const style =
      spec.styles?.[mech] ??
      DEFAULT_STYLES[mech] ??
      ({
        color: FALLBACK_COLORS[fallbackIdx++ % FALLBACK_COLORS.length],
        dash: "",
      } as LineStyle);
    const pts = series.get(mech)!;
    const coords = pts
      .map((p) => `${fmtNum(px(p.eMax))},${fmtNum(py(p.mean))}`)
      .join(" ");
    const dash = style.dash ? ` stroke-dasharray="${style.dash}"` : "";
    parts.push(
      `<polyline data-mechanism="${escapeXml(mech)}" points="${coords}" fill="none" stroke="${style.color}" stroke-width="1.8"${dash}/>`,
    );
    for (const p of pts) {
      const x = px(p.eMax);
      const yLo = py(Math.max(0, p.mean - p.stderr));
      const yHi = py(Math.min(1, p.mean + p.stderr));
      parts.push(
        `<line class="errtick" x1="${fmtNum(x)}" y1="${fmtNum(yLo)}" x2="${fmtNum(x)}" y2="${fmtNum(yHi)}" stroke="${style.color}" stroke-width="1"/>`,
      );
      parts.push(
        `<line class="errcap" x1="${fmtNum(x - 3)}" y1="${fmtNum(yLo)}" x2="${fmtNum(x + 3)}" y2="${fmtNum(yLo)}" stroke="${style.color}" stroke-width="1"/>`,
      );
      parts.push(
        `<line class="errcap" x1="${fmtNum(x - 3)}" y1="${fmtNum(yHi)}" x2="${fmtNum(x + 3)}" y2="${fmtNum(yHi)}" stroke="${style.color}" stroke-width="1"/>`,
      );
    }
    const ly = MARGIN.top + 16 + order * 18;
    const lx = MARGIN.left + 12;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" stroke="${style.color}" stroke-width="1.8"${dash}/>`,
    );
    parts.push(
      `<text x="${lx + 32}" y="${ly}" font-size="11">${escapeXml(mech)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Decode a rendered polyline back into data-space ratios (for testing and
 * for locating crossings in what was actually drawn). */
export function polylineRatios(svg: string, mechanism: string): number[] {
  const re = new RegExp(
    `<polyline data-mechanism="${mechanism.replace(/[+]/g, "\\+")}" points="([^"]*)"`,
  );
  const match = svg.match(re);
  if (!match) {
    throw new Error(`no polyline for ${mechanism}`);
  }
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  return match[1]
    .split(" ")
    .map((pair) => Number(pair.split(",")[1]))
    .map((y) => 1 - (y - MARGIN.top) / plotH);
}
