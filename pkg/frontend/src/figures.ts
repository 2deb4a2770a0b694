/** Figure builders over the experiment CSV schemas. */

import { InputError, numeric, parseCsv, requireColumns, Table } from "./csv.js";
import { extent, Figure, fmt, linearFit, PALETTE } from "./svg.js";

export type FigureKind =
  | "phase-curves"
  | "near-critical"
  | "intermediate"
  | "multifractal";

function sortedBy(table: Table, col: string): Table {
  const rows = [...table.rows].sort((a, b) => (a[col] as number) - (b[col] as number));
  return { columns: table.columns, rows };
}

/** eta* and gamma/log d against beta, with both transitions marked. */
export function phaseCurves(table: Table): string {
  requireColumns(table, ["beta", "eta_star", "gamma", "log_d", "beta_c", "beta_c_erg"]);
  const t = sortedBy(table, "beta");
  const beta = numeric(t, "beta");
  const eta = numeric(t, "eta_star");
  const gammaRel = numeric(t, "gamma").map((g, i) => g / (t.rows[i].log_d as number));
  const bc = t.rows[0].beta_c as number;
  const berg = t.rows[0].beta_c_erg as number;
  const fig = new Figure(
    extent(beta),
    extent([...eta, ...gammaRel, 0, 1]),
    "Tilt and speed exponents across the phase diagram",
    "beta",
    "eta* and gamma/log d",
  );
  fig.line(beta, eta, PALETTE[0]);
  fig.points(beta, eta, PALETTE[0], 2.2);
  fig.line(beta, gammaRel, PALETTE[1]);
  fig.points(beta, gammaRel, PALETTE[1], 2.2);
  fig.vline(bc, "#666", `beta_c=${fmt(bc)}`);
  fig.vline(berg, "#666", `beta_c_erg=${fmt(berg)}`);
  fig.legend([
    ["eta* (crosses 1 at beta_c_erg)", PALETTE[0]],
    ["gamma/log d (peaks at beta_c_erg)", PALETTE[1]],
  ]);
  return fig.render();
}

/** log mean conductance against eps^{-1/2}, with the fitted line. */
export function nearCritical(table: Table): string {
  requireColumns(table, ["eps", "log_mean_conductance"]);
  const t = sortedBy(table, "eps");
  const xs = numeric(t, "eps").map((e) => 1 / Math.sqrt(e));
  const ys = numeric(t, "log_mean_conductance");
  const fig = new Figure(
    extent(xs),
    extent(ys),
    "Near-critical conductance decay",
    "eps^{-1/2}",
    "log E[C_eff]",
  );
  fig.points(xs, ys, PALETTE[0]);
  if (xs.length >= 2) {
    const { slope, intercept, r2 } = linearFit(xs, ys);
    const xr = [Math.min(...xs), Math.max(...xs)];
    fig.line(xr, xr.map((x) => slope * x + intercept), PALETTE[1], 1.4, "5 4");
    fig.annotate(`slope ${fmt(slope)}`, 0);
    fig.annotate(`R^2 ${fmt(r2)}`, 1);
  }
  return fig.render();
}

/** median log sums against depth with the fitted volume exponent. */
export function intermediate(table: Table): string {
  requireColumns(table, ["depth", "median_log_sum", "nu_hat", "nu_theory", "se_log_sum"]);
  const t = sortedBy(table, "depth");
  const xs = numeric(t, "depth");
  const ys = numeric(t, "median_log_sum");
  const se = numeric(t, "se_log_sum");
  const logD = Math.log(t.rows[0].d as number);
  const fig = new Figure(
    extent(xs),
    extent(ys),
    "Intermediate phase: growth of the occupation sum",
    "depth n",
    "median log sum",
  );
  fig.errorBars(xs, ys, se, PALETTE[0]);
  fig.points(xs, ys, PALETTE[0]);
  const nuHat = t.rows[0].nu_hat as number;
  const nuRef = t.rows[0].nu_theory as number;
  // reference slope line anchored at the first point
  const y0 = ys[0];
  fig.line(xs, xs.map((x) => y0 + nuRef * logD * (x - xs[0])), PALETTE[2], 1.4, "5 4");
  fig.annotate(`nu_hat ${fmt(nuHat)}`, 0);
  fig.annotate(`nu theory ${fmt(nuRef)}`, 1);
  return fig.render();
}

/** measured moment exponents over the two-branch reference curve. */
export function multifractal(table: Table): string {
  requireColumns(table, ["eta", "tau_hat", "tau_theory", "knot_hat", "eta_star"]);
  const byEta = new Map<number, { hat: number; ref: number }>();
  for (const r of table.rows) {
    byEta.set(r.eta as number, { hat: r.tau_hat as number, ref: r.tau_theory as number });
  }
  const etas = [...byEta.keys()].sort((a, b) => a - b);
  const hats = etas.map((e) => byEta.get(e)!.hat);
  const refs = etas.map((e) => byEta.get(e)!.ref);
  const fig = new Figure(
    extent([0, ...etas, 1]),
    extent([0, ...hats, ...refs]),
    "Multifractal moment exponents",
    "eta",
    "tau(eta)",
  );
  fig.line(etas, refs, PALETTE[2], 1.4, "5 4");
  fig.points(etas, hats, PALETTE[0]);
  const knot = table.rows[0].knot_hat as number;
  const etaStar = table.rows[0].eta_star as number;
  fig.vline(etaStar, "#666", `eta*=${fmt(etaStar)}`);
  fig.vline(knot, PALETTE[1], `knot=${fmt(knot)}`);
  fig.legend([
    ["measured tau_hat", PALETTE[0]],
    ["two-branch reference", PALETTE[2]],
  ]);
  return fig.render();
}

const BUILDERS: Record<FigureKind, (t: Table) => string> = {
  "phase-curves": phaseCurves,
  "near-critical": nearCritical,
  intermediate: intermediate,
  multifractal: multifractal,
};

export function buildFigure(kind: string, csvTexts: string[]): string {
  const builder = BUILDERS[kind as FigureKind];
  if (!builder) {
    throw new InputError(
      `unknown figure kind ${kind}; expected one of ${Object.keys(BUILDERS).join(", ")}`,
    );
  }
  if (csvTexts.length === 0) {
    throw new InputError("no input files");
  }
  const tables = csvTexts.map(parseCsv);
  const merged: Table = {
    columns: tables[0].columns,
    rows: tables.flatMap((t) => t.rows),
  };
  return builder(merged);
}
