/** Strict readers for the simulator's CSV artifacts.
 *
 * Every kind has a fixed header and per-column rules; `validateCsv`
 * either returns the parsed rows or a list of row-addressed errors.
 * The files never quote fields, so a plain comma split is exact.
 */

export type Row = Record<string, string>;

export interface ValidationResult {
  ok: boolean;
  kind: CsvKind;
  rows: Row[];
  errors: string[];
}

export type CsvKind =
  | "trajectory"
  | "survival_curve"
  | "lambda_search"
  | "phase_boundary"
  | "bounds_sweep"
  | "openness_sweep"
  | "perc_sweep";

export const HEADERS: Record<CsvKind, string[]> = {
  trajectory: ["t", "infected_particles", "contaminated_sites"],
  survival_curve: ["t", "survival_fraction"],
  lambda_search: ["lambda", "survived", "sims_used"],
  phase_boundary: ["lambda", "gamma_c_hat", "resolved", "trials_used"],
  bounds_sweep: [
    "lambda",
    "gamma",
    "v_k",
    "p_part_star",
    "p_site_star",
    "offspring_bound",
    "subcritical",
  ],
  openness_sweep: ["lambda", "gamma", "k", "trials", "p_tilde", "ci", "p_open"],
  perc_sweep: ["n", "adjacency", "p", "spanning_fraction"],
};

const isFiniteNumber = (s: string) => s !== "" && Number.isFinite(Number(s));
const isNonNegInt = (s: string) => /^\d+$/.test(s);
const isBool = (s: string) => s === "true" || s === "false";
const inUnit = (s: string) =>
  isFiniteNumber(s) && Number(s) >= 0 && Number(s) <= 1;

type ColumnRule = (value: string) => string | null;

function numeric(name: string): ColumnRule {
  return (v) => (isFiniteNumber(v) ? null : `${name} is not a finite number: ${JSON.stringify(v)}`);
}
function nonNegative(name: string): ColumnRule {
  return (v) =>
    isFiniteNumber(v) && Number(v) >= 0 ? null : `${name} must be a number >= 0: ${JSON.stringify(v)}`;
}
function positive(name: string): ColumnRule {
  return (v) =>
    isFiniteNumber(v) && Number(v) > 0 ? null : `${name} must be a number > 0: ${JSON.stringify(v)}`;
}
function count(name: string): ColumnRule {
  return (v) => (isNonNegInt(v) ? null : `${name} must be a non-negative integer: ${JSON.stringify(v)}`);
}
function boolean(name: string): ColumnRule {
  return (v) => (isBool(v) ? null : `${name} must be true/false: ${JSON.stringify(v)}`);
}
function probability(name: string): ColumnRule {
  return (v) => (inUnit(v) ? null : `${name} must be in [0, 1]: ${JSON.stringify(v)}`);
}

const COLUMN_RULES: Record<CsvKind, Record<string, ColumnRule>> = {
  trajectory: {
    t: nonNegative("t"),
    infected_particles: count("infected_particles"),
    contaminated_sites: count("contaminated_sites"),
  },
  survival_curve: {
    t: nonNegative("t"),
    survival_fraction: probability("survival_fraction"),
  },
  lambda_search: {
    lambda: positive("lambda"),
    survived: boolean("survived"),
    sims_used: count("sims_used"),
  },
  phase_boundary: {
    lambda: positive("lambda"),
    // empty when the clearance sweep hit its floor without a survivor
    gamma_c_hat: (v) => (v === "" ? null : positive("gamma_c_hat")(v)),
    resolved: boolean("resolved"),
    trials_used: count("trials_used"),
  },
  bounds_sweep: {
    lambda: positive("lambda"),
    gamma: positive("gamma"),
    v_k: count("v_k"),
    p_part_star: probability("p_part_star"),
    p_site_star: probability("p_site_star"),
    offspring_bound: nonNegative("offspring_bound"),
    subcritical: boolean("subcritical"),
  },
  openness_sweep: {
    lambda: positive("lambda"),
    gamma: positive("gamma"),
    k: count("k"),
    trials: count("trials"),
    p_tilde: probability("p_tilde"),
    ci: nonNegative("ci"),
    p_open: probability("p_open"),
  },
  perc_sweep: {
    n: count("n"),
    adjacency: (v) =>
      v === "four" || v === "eight" ? null : `adjacency must be four/eight: ${JSON.stringify(v)}`,
    p: probability("p"),
    spanning_fraction: probability("spanning_fraction"),
  },
};

/** Cross-row rules that single cells cannot express. */
function sequenceErrors(kind: CsvKind, rows: Row[]): string[] {
  const errors: string[] = [];
  const column = (name: string) => rows.map((r) => Number(r[name]));
  if (kind === "survival_curve") {
    const t = column("t");
    const f = column("survival_fraction");
    for (let i = 1; i < rows.length; i++) {
      if (t[i] <= t[i - 1]) errors.push(`row ${i + 2}: t must be strictly increasing`);
      if (f[i] > f[i - 1] + 1e-12)
        errors.push(`row ${i + 2}: survival_fraction must be non-increasing (absorbing extinction)`);
    }
  }
  if (kind === "trajectory") {
    const t = column("t");
    for (let i = 1; i < rows.length; i++) {
      if (t[i] < t[i - 1]) errors.push(`row ${i + 2}: t must be non-decreasing`);
    }
  }
  if (kind === "lambda_search") {
    const lam = column("lambda");
    for (let i = 1; i < rows.length; i++) {
      if (lam[i] >= lam[i - 1])
        errors.push(`row ${i + 2}: lambda must be strictly decreasing (downward walk)`);
    }
  }
  if (kind === "phase_boundary") {
    rows.forEach((r, i) => {
      if (r.resolved === "true" && r.gamma_c_hat === "")
        errors.push(`row ${i + 2}: resolved rows need gamma_c_hat`);
      if (r.resolved === "false" && r.gamma_c_hat !== "")
        errors.push(`row ${i + 2}: unresolved rows must leave gamma_c_hat empty`);
    });
  }
  return errors;
}

export function validateCsv(kind: CsvKind, text: string): ValidationResult {
  const errors: string[] = [];
  const lines = text.split("\n");
  if (lines.at(-1) === "") lines.pop();
  const header = HEADERS[kind];
  if (lines.length === 0) {
    return { ok: false, kind, rows: [], errors: ["empty file"] };
  }
  if (lines[0] !== header.join(",")) {
    errors.push(`bad header: expected ${JSON.stringify(header.join(","))}, got ${JSON.stringify(lines[0])}`);
    return { ok: false, kind, rows: [], errors };
  }
  const rules = COLUMN_RULES[kind];
  const rows: Row[] = [];
  lines.slice(1).forEach((line, i) => {
    const parts = line.split(",");
    if (parts.length !== header.length) {
      errors.push(`row ${i + 2}: expected ${header.length} fields, got ${parts.length}`);
      return;
    }
    const row: Row = {};
    header.forEach((name, j) => {
      row[name] = parts[j];
      const problem = rules[name](parts[j]);
      if (problem) errors.push(`row ${i + 2}: ${problem}`);
    });
    rows.push(row);
  });
  if (rows.length === 0) errors.push("no data rows");
  if (errors.length === 0) errors.push(...sequenceErrors(kind, rows));
  return { ok: errors.length === 0, kind, rows, errors };
}
