/** Figure assembly: pick columns, build scales, emit the SVG document.
 *
 * Two figure kinds:
 *
 * - rmse_sweep: log-log RMSE of one angle versus the sweep value, with the
 *   square-root CRB (dashed) and ACRB (dotted) columns as reference lines.
 * - convergence: per-angle absolute error versus iteration, log y-axis.
 */

import { column, parseTable, seriesColumns, Table } from "./csv.js";
import { EmptyTableError } from "./errors.js";
import {
  document,
  frameMarkup,
  HEIGHT,
  legendMarkup,
  linearScale,
  logScale,
  MARGIN,
  Scale,
  Series,
  seriesMarkup,
  WIDTH,
} from "./svg.js";

export type FigureKind = "rmse_sweep" | "convergence";

export interface FigureSpec {
  kind: FigureKind;
  /** 1-based source index; used by rmse_sweep, ignored by convergence. */
  angle: number;
}

const TRACE_COLORS = ["#1f6feb", "#d1242f", "#1a7f37", "#8250df", "#bf8700"];

interface Prepared {
  series: Series[];
  xLog: boolean;
  labels: { x: string; y: string; title: string };
}

function positiveExtent(series: Series[], axis: "x" | "y"): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const v of s[axis]) {
      if (v > 0) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
  }
  if (!(lo <= hi)) {
    return [1e-4, 1];
  }
  return [lo, hi];
}

function extent(series: Series[], axis: "x" | "y"): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const v of s[axis]) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  return [lo, hi];
}

/** Keep only points with positive y (log axes cannot show the rest). */
function positivePoints(x: number[], y: number[]): { x: number[]; y: number[] } {
  const ox: number[] = [];
  const oy: number[] = [];
  for (let i = 0; i < y.length; i += 1) {
    if (y[i]! > 0) {
      ox.push(x[i]!);
      oy.push(y[i]!);
    }
  }
  return { x: ox, y: oy };
}

function prepareRmseSweep(table: Table, angle: number): Prepared {
  const sweep = column(table, "sweep_value");
  const rmse = column(table, `rmse_theta${angle}_deg`);
  const crb = column(table, `crb_theta${angle}_deg`);
  const acrb = column(table, `acrb_theta${angle}_deg`);
  const series: Series[] = [
    {
      ...positivePoints(sweep, rmse),
      name: `RMSE theta${angle}`,
      style: { stroke: "#1f6feb", markers: true, cssClass: "rmse-curve" },
    },
    {
      ...positivePoints(sweep, crb),
      name: "sqrt CRB",
      style: { stroke: "#d1242f", dash: "7 4", cssClass: "crb-line" },
    },
    {
      ...positivePoints(sweep, acrb),
      name: "sqrt ACRB",
      style: { stroke: "#1a7f37", dash: "2 4", cssClass: "acrb-line" },
    },
  ];
  return {
    series,
    xLog: true,
    labels: {
      x: "sweep value",
      y: "RMSE (degrees)",
      title: `RMSE of theta${angle} with bound references`,
    },
  };
}

function prepareConvergence(table: Table): Prepared {
  const iter = column(table, "iteration");
  const names = seriesColumns(table, "abs_err_theta", "_deg");
  if (names.length === 0) {
    // reuse the named-column error path so the message lists what exists
    column(table, "abs_err_theta1_deg");
  }
  const series: Series[] = names.map((name, i) => {
    const angle = i + 1;
    return {
      ...positivePoints(iter, column(table, name)),
      name: `theta${angle}`,
      style: {
        stroke: TRACE_COLORS[i % TRACE_COLORS.length]!,
        markers: true,
        cssClass: `trace-${angle}`,
      },
    };
  });
  return {
    series,
    xLog: false,
    labels: {
      x: "iteration",
      y: "absolute error (degrees)",
      title: "Convergence of the angle estimates",
    },
  };
}

/** Render one CSV text into a standalone SVG document string. */
export function renderFigure(csvText: string, spec: FigureSpec): string {
  if (!Number.isInteger(spec.angle) || spec.angle < 1) {
    throw new EmptyTableError(`angle must be a positive integer, got ${spec.angle}`);
  }
  const table = parseTable(csvText);
  const prepared =
    spec.kind === "rmse_sweep"
      ? prepareRmseSweep(table, spec.angle)
      : prepareConvergence(table);

  const plotted = prepared.series.filter((s) => s.x.length > 0);
  if (plotted.length === 0) {
    throw new EmptyTableError("no positive values to place on the log axis");
  }

  const rx: [number, number] = [MARGIN.left, WIDTH - MARGIN.right];
  const ry: [number, number] = [HEIGHT - MARGIN.bottom, MARGIN.top];
  let sx: Scale;
  if (prepared.xLog) {
    const [lo, hi] = positiveExtent(plotted, "x");
    sx = logScale(lo, hi, rx[0], rx[1]);
  } else {
    const [lo, hi] = extent(plotted, "x");
    sx = linearScale(lo, hi, rx[0], rx[1]);
  }
  const [ylo, yhi] = positiveExtent(plotted, "y");
  const sy = logScale(ylo, yhi, ry[0], ry[1]);

  const body = [
    frameMarkup(sx, sy, prepared.labels),
    ...plotted.map((s) => seriesMarkup(s, sx, sy)),
    legendMarkup(plotted),
  ].join("\n");
  return document(body);
}
