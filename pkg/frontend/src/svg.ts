/** Tiny deterministic SVG plotting: fixed canvas, no randomness, no
 * timestamps, so renders are byte-stable for a given input. */

export interface Series {
  label: string;
  points: Array<[number, number]>;
  color: string;
  /** open markers flag unresolved / censored points */
  open?: boolean;
}

export interface PlotSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  logX?: boolean;
  /** dashed vertical guide lines, e.g. a critical-rate estimate */
  vlines?: Array<{ x: number; label: string }>;
  hlines?: Array<{ y: number; label: string }>;
}

const W = 640;
const H = 420;
const M = { left: 62, right: 16, top: 34, bottom: 46 };

const fmt = (x: number) => {
  const s = x.toPrecision(4);
  return String(Number(s));
};

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function ticks(lo: number, hi: number, n = 5): number[] {
  if (lo === hi) return [lo];
  const out: number[] = [];
  for (let i = 0; i <= n; i++) out.push(lo + ((hi - lo) * i) / n);
  return out;
}

export function renderPlot(spec: PlotSpec): string {
  const xs = spec.series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = spec.series.flatMap((s) => s.points.map((p) => p[1]));
  for (const v of spec.vlines ?? []) xs.push(v.x);
  for (const h of spec.hlines ?? []) ys.push(h.y);
  if (xs.length === 0) throw new Error("nothing to plot");
  const tx = spec.logX ? Math.log10 : (x: number) => x;
  if (spec.logX && xs.some((x) => x <= 0)) {
    throw new Error("log-scale x axis needs positive values");
  }
  let xLo = Math.min(...xs.map(tx));
  let xHi = Math.max(...xs.map(tx));
  let yLo = Math.min(...ys, 0);
  let yHi = Math.max(...ys);
  if (xLo === xHi) (xLo -= 0.5), (xHi += 0.5);
  if (yLo === yHi) yHi += 1;
  yHi += 0.05 * (yHi - yLo);
  const px = (x: number) => M.left + ((tx(x) - xLo) / (xHi - xLo)) * (W - M.left - M.right);
  const py = (y: number) => H - M.bottom - ((y - yLo) / (yHi - yLo)) * (H - M.top - M.bottom);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(`<text x="${W / 2}" y="20" text-anchor="middle" font-size="14">${esc(spec.title)}</text>`);

  // axes + ticks
  const axis = `stroke="black" stroke-width="1"`;
  parts.push(`<line x1="${M.left}" y1="${H - M.bottom}" x2="${W - M.right}" y2="${H - M.bottom}" ${axis}/>`);
  parts.push(`<line x1="${M.left}" y1="${M.top}" x2="${M.left}" y2="${H - M.bottom}" ${axis}/>`);
  for (const t of ticks(xLo, xHi)) {
    const x = M.left + ((t - xLo) / (xHi - xLo)) * (W - M.left - M.right);
    const label = spec.logX ? `1e${fmt(t)}` : fmt(t);
    parts.push(`<line x1="${fmt(x)}" y1="${H - M.bottom}" x2="${fmt(x)}" y2="${H - M.bottom + 5}" ${axis}/>`);
    parts.push(`<text x="${fmt(x)}" y="${H - M.bottom + 18}" text-anchor="middle">${esc(label)}</text>`);
  }
  for (const t of ticks(yLo, yHi)) {
    const y = py(t);
    parts.push(`<line x1="${M.left - 5}" y1="${fmt(y)}" x2="${M.left}" y2="${fmt(y)}" ${axis}/>`);
    parts.push(`<text x="${M.left - 8}" y="${fmt(y + 4)}" text-anchor="end">${esc(fmt(t))}</text>`);
  }
  parts.push(
    `<text x="${(M.left + W - M.right) / 2}" y="${H - 8}" text-anchor="middle">${esc(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${(M.top + H - M.bottom) / 2}" text-anchor="middle" transform="rotate(-90 16 ${(M.top + H - M.bottom) / 2})">${esc(spec.yLabel)}</text>`,
  );

  for (const v of spec.vlines ?? []) {
    const x = px(v.x);
    parts.push(
      `<line x1="${fmt(x)}" y1="${M.top}" x2="${fmt(x)}" y2="${H - M.bottom}" stroke="gray" stroke-dasharray="5,4"/>`,
    );
    parts.push(`<text x="${fmt(x + 4)}" y="${M.top + 12}" fill="gray">${esc(v.label)}</text>`);
  }
  for (const h of spec.hlines ?? []) {
    const y = py(h.y);
    parts.push(
      `<line x1="${M.left}" y1="${fmt(y)}" x2="${W - M.right}" y2="${fmt(y)}" stroke="gray" stroke-dasharray="5,4"/>`,
    );
    parts.push(`<text x="${W - M.right - 4}" y="${fmt(y - 5)}" fill="gray" text-anchor="end">${esc(h.label)}</text>`);
  }

  spec.series.forEach((s, idx) => {
    const pts = s.points.map(([x, y]) => [px(x), py(y)]);
    if (pts.length > 1) {
      const d = pts.map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)} ${fmt(y)}`).join(" ");
      parts.push(`<path d="${d}" fill="none" stroke="${s.color}" stroke-width="1.5"/>`);
    }
    for (const [x, y] of pts) {
      const fill = s.open ? "white" : s.color;
      parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="3.5" fill="${fill}" stroke="${s.color}"/>`);
    }
    parts.push(
      `<text x="${W - M.right - 4}" y="${M.top + 14 * (idx + 1)}" text-anchor="end" fill="${s.color}">${esc(s.label)}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
