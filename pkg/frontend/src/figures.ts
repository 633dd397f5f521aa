/**
 * Figure assembly: reads the toolkit's CSV outputs and renders deterministic
 * SVG images.  ED curves are lines, sweep estimates are error-barred points,
 * convergence criteria get a y=1 guide line.  No physics is recomputed here.
 */

import { readFileSync } from "node:fs";

import {
  CsvError,
  DiagPoint,
  EdPoint,
  SweepPoint,
  readDiag,
  readEd,
  readSweep,
} from "./csv.js";
import { PlotFrame, Range, SvgPlot, niceTicks } from "./svg.js";

export const FIGURE_IDS = ["fig1", "fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig5"] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

export interface FigureSpec {
  figure: FigureId;
  /** ED reference CSV (temperature_K,sz_over_hbar_exact). */
  ed?: string;
  /** Sweep CSVs (temperature_K,sz_over_hbar,std_error,model,order,...). */
  sweeps: string[];
  /** Diagnostics CSV (temperature_K,criterion,mode); fig5 only. */
  diag?: string;
  out: string;
}

export interface FigureData {
  ed: EdPoint[];
  sweeps: Array<{ path: string; label: string; points: SweepPoint[] }>;
  diag: DiagPoint[];
}

const SWEEP_COLORS = ["#d95f02", "#7570b3", "#1b9e77", "#e7298a", "#66a61e"];

const TITLES: Record<FigureId, string> = {
  fig1: "Exact thermal spin expectation",
  fig2: "Correction series vs exact result (s = 2)",
  fig3a: "Ferromagnetic dimer: simulation vs exact",
  fig3b: "Ferromagnetic dimer, higher spin: simulation vs exact",
  fig4a: "Antiferromagnetic dimer: simulation vs exact",
  fig4b: "Antiferromagnetic dimer, higher spin: simulation vs exact",
  fig5: "Convergence criteria",
};

function sweepLabel(points: SweepPoint[], path: string): string {
  if (points.length === 0) return path;
  const { model, order } = points[0];
  return model === "classical" || model === "eigen-overlap"
    ? model
    : `${model} (order ${order})`;
}

/** Load and validate every input referenced by the spec. */
export function loadFigureData(spec: FigureSpec): FigureData {
  const read = (path: string): string => {
    let text: string;
    try {
      text = readFileSync(path, "utf8");
    } catch {
      throw new CsvError(`cannot read CSV file: ${path}`);
    }
    if (text.trim().length === 0) throw new CsvError(`empty CSV file: ${path}`);
    return text;
  };

  if (spec.figure === "fig5") {
    if (!spec.diag) throw new CsvError("fig5 requires --diag");
    return { ed: [], sweeps: [], diag: readDiag(read(spec.diag), spec.diag) };
  }
  if (!spec.ed) throw new CsvError(`${spec.figure} requires --ed`);
  const ed = readEd(read(spec.ed), spec.ed);
  if (ed.length === 0) throw new CsvError(`no data rows in ${spec.ed}`);
  const sweeps = spec.sweeps.map((path) => {
    const points = readSweep(read(path), path);
    if (points.length === 0) throw new CsvError(`no data rows in ${path}`);
    return { path, label: sweepLabel(points, path), points };
  });
  if (spec.figure !== "fig1" && sweeps.length === 0) {
    throw new CsvError(`${spec.figure} requires at least one --sweep`);
  }
  return { ed, sweeps, diag: [] };
}

function span(values: number[], padFrac = 0.08): Range {
  const finite = values.filter(Number.isFinite);
  const min = Math.min(...finite);
  const max = Math.max(...finite);
  const pad = (max - min || Math.abs(max) || 1) * padFrac;
  return { min: min - pad, max: max + pad };
}

export function renderFigure(spec: FigureSpec, data: FigureData): string {
  const frame: PlotFrame = {
    width: 640,
    height: 440,
    margin: { left: 64, right: 24, top: 32, bottom: 48 },
    x: { min: 0, max: 1 },
    y: { min: 0, max: 1 },
    xLog: false,
    yLog: false,
  };

  if (spec.figure === "fig5") {
    const xs = data.diag.map((d) => d.T);
    const ys = data.diag.map((d) => d.value).concat([1]);
    frame.x = span(xs);
    frame.y = span(ys.map((v) => Math.max(v, 1e-12)));
    frame.xLog = frame.x.min > 0 && frame.x.max / Math.max(frame.x.min, 1e-12) > 50;
    const plot = new SvgPlot(frame);
    plot.title(TITLES.fig5);
    plot.axes(
      "temperature (K)",
      "criterion",
      niceTicks(frame.x),
      niceTicks(frame.y),
    );
    plot.hGuide(1.0, "#888");
    const modes = [...new Set(data.diag.map((d) => d.mode))];
    modes.forEach((mode, i) => {
      const pts = data.diag
        .filter((d) => d.mode === mode)
        .sort((a, b) => a.T - b.T)
        .map((d): [number, number] => [d.T, d.value]);
      plot.line(pts, SWEEP_COLORS[i % SWEEP_COLORS.length]);
    });
    plot.legend(modes.map((m, i) => [m, SWEEP_COLORS[i % SWEEP_COLORS.length]]));
    return plot.render();
  }

  const xs = data.ed.map((d) => d.T).concat(data.sweeps.flatMap((s) => s.points.map((p) => p.T)));
  const ys = data.ed
    .map((d) => d.sz)
    .concat(
      data.sweeps.flatMap((s) =>
        s.points.filter((p) => Number.isFinite(p.sz)).flatMap((p) => [p.sz - p.err, p.sz + p.err]),
      ),
    );
  frame.x = span(xs);
  frame.y = span(ys);
  const plot = new SvgPlot(frame);
  plot.title(TITLES[spec.figure]);
  plot.axes(
    "temperature (K)",
    "⟨S_z⟩/ħ",
    niceTicks(frame.x),
    niceTicks(frame.y),
  );
  const edPts = [...data.ed]
    .sort((a, b) => a.T - b.T)
    .map((d): [number, number] => [d.T, d.sz]);
  plot.line(edPts, "#222");
  data.sweeps.forEach((s, i) => {
    const color = SWEEP_COLORS[i % SWEEP_COLORS.length];
    const pts = [...s.points]
      .sort((a, b) => a.T - b.T)
      .map((p): [number, number, number] => [p.T, p.sz, p.err]);
    plot.errorPoints(pts, color);
  });
  plot.legend([
    ["exact (ED)", "#222"],
    ...data.sweeps.map((s, i): [string, string] => [
      s.label,
      SWEEP_COLORS[i % SWEEP_COLORS.length],
    ]),
  ]);
  return plot.render();
}

export function render(spec: FigureSpec): string {
  return renderFigure(spec, loadFigureData(spec));
}
