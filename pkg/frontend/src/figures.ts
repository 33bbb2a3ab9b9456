/** One figure builder per CSV kind: validate, then map rows to a plot. */

import { validateCsv, type Row } from "./csv.js";
import { renderPlot, type PlotSpec } from "./svg.js";

export class FigureError extends Error {}

function parsed(kind: Parameters<typeof validateCsv>[0], text: string): Row[] {
  const result = validateCsv(kind, text);
  if (!result.ok) {
    throw new FigureError(`invalid ${kind} input:\n  ${result.errors.join("\n  ")}`);
  }
  return result.rows;
}

/** Phase boundary in the (recovery rate, clearance rate) plane; the
 * estimated critical recovery rate is drawn as a dashed guide, and
 * unresolved boundary points show as open markers. */
export function phaseBoundaryFigure(csv: string, lambdaCInfHat?: number): string {
  const rows = parsed("phase_boundary", csv);
  const resolved = rows.filter((r) => r.resolved === "true");
  const unresolved = rows.filter((r) => r.resolved === "false");
  const spec: PlotSpec = {
    title: "Phase boundary: critical clearance rate vs recovery rate",
    xLabel: "recovery rate λ",
    yLabel: "estimated critical clearance rate γ̂_c",
    series: [
      {
        label: "γ̂_c(λ)",
        color: "#1f77b4",
        points: resolved.map((r) => [Number(r.lambda), Number(r.gamma_c_hat)]),
      },
    ],
    vlines:
      lambdaCInfHat === undefined
        ? []
        : [{ x: lambdaCInfHat, label: `λ̂_c^∞ = ${lambdaCInfHat}` }],
  };
  if (unresolved.length > 0) {
    spec.series.push({
      label: "unresolved (sweep floor)",
      color: "#d62728",
      open: true,
      points: unresolved.map((r) => [Number(r.lambda), 0]),
    });
  }
  return renderPlot(spec);
}

export function survivalCurveFigure(csv: string): string {
  const rows = parsed("survival_curve", csv);
  return renderPlot({
    title: "Replica survival curve",
    xLabel: "time",
    yLabel: "fraction of replicas with infection present",
    series: [
      {
        label: "survival fraction",
        color: "#2ca02c",
        points: rows.map((r) => [Number(r.t), Number(r.survival_fraction)]),
      },
    ],
  });
}

export function opennessFigure(csv: string): string {
  const rows = parsed("openness_sweep", csv);
  return renderPlot({
    title: "Region openness vs clearance rate",
    xLabel: "clearance rate γ (log scale)",
    yLabel: "estimated openness probability",
    logX: true,
    series: [
      {
        label: "p_open",
        color: "#9467bd",
        points: rows.map((r) => [Number(r.gamma), Number(r.p_open)]),
      },
    ],
    hlines: [{ y: 0.593, label: "site-percolation threshold" }],
  });
}

export function percCrossingFigure(csv: string): string {
  const rows = parsed("perc_sweep", csv);
  return renderPlot({
    title: "Spanning probability vs site-open probability",
    xLabel: "site-open probability p",
    yLabel: "spanning fraction",
    series: [
      {
        label: "spanning fraction",
        color: "#ff7f0e",
        points: rows.map((r) => [Number(r.p), Number(r.spanning_fraction)]),
      },
    ],
    hlines: [{ y: 0.5, label: "crossing level" }],
  });
}

export const FIGURES = {
  phase_boundary: phaseBoundaryFigure,
  survival_curve: survivalCurveFigure,
  openness_sweep: opennessFigure,
  perc_crossing: percCrossingFigure,
} as const;

export type FigureKind = keyof typeof FIGURES;
