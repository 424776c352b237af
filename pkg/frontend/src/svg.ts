/** Hand-rolled SVG figure primitives.
 *
 * Everything here is a pure string transform with fixed-precision number
 * formatting, so rendering the same inputs always yields the same bytes.
 */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const WIDTH = 640;
export const HEIGHT = 440;
export const MARGIN: Margin = { top: 34, right: 24, bottom: 52, left: 74 };

/** Pixel coordinate with two decimals; -0.00 normalized to 0.00. */
export function px(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export interface Scale {
  (v: number): number;
  ticks: number[];
  label(tick: number): string;
}

function tickLabel(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a < 1e-3 || a >= 1e4)) {
    return v.toExponential(0).replace("e+", "e").replace("e-", "e-");
  }
  // strip trailing zeros without locale surprises
  return String(parseFloat(v.toPrecision(6)));
}

/** Linear scale from [lo, hi] onto [rlo, rhi] with ~n round ticks. */
export function linearScale(
  lo: number,
  hi: number,
  rlo: number,
  rhi: number,
  n = 6,
): Scale {
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const span = hi - lo;
  const rawStep = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const norm = rawStep / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  const f = (v: number) => rlo + ((v - lo) / (hi - lo)) * (rhi - rlo);
  return Object.assign(f, { ticks, label: tickLabel });
}

/** Log10 scale with decade ticks; domain must be positive. */
export function logScale(
  lo: number,
  hi: number,
  rlo: number,
  rhi: number,
): Scale {
  if (!(lo > 0) || !(hi > 0)) {
    throw new Error(`log scale needs positive bounds, got [${lo}, ${hi}]`);
  }
  if (lo === hi) {
    lo /= 10;
    hi *= 10;
  }
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const ticks: number[] = [];
  for (let k = Math.ceil(llo - 1e-9); k <= lhi + 1e-9; k += 1) {
    ticks.push(Math.pow(10, k));
  }
  const f = (v: number) => rlo + ((Math.log10(v) - llo) / (lhi - llo)) * (rhi - rlo);
  return Object.assign(f, { ticks, label: tickLabel });
}

export interface SeriesStyle {
  stroke: string;
  dash?: string;
  markers?: boolean;
  cssClass: string;
}

export interface Series {
  x: number[];
  y: number[];
  name: string;
  style: SeriesStyle;
}

function polyline(xs: string[], ys: string[]): string {
  return xs.map((x, i) => `${i === 0 ? "M" : "L"}${x} ${ys[i]}`).join(" ");
}

/** One plotted series: a path plus optional circle markers. */
export function seriesMarkup(s: Series, sx: Scale, sy: Scale): string {
  const xs = s.x.map((v) => px(sx(v)));
  const ys = s.y.map((v) => px(sy(v)));
  const dash = s.style.dash ? ` stroke-dasharray="${s.style.dash}"` : "";
  const parts: string[] = [];
  if (xs.length > 1) {
    parts.push(
      `<path class="${s.style.cssClass}" d="${polyline(xs, ys)}" fill="none" ` +
        `stroke="${s.style.stroke}" stroke-width="1.8"${dash}/>`,
    );
  }
  if (s.style.markers || xs.length === 1) {
    for (let i = 0; i < xs.length; i += 1) {
      parts.push(
        `<circle class="${s.style.cssClass}" cx="${xs[i]}" cy="${ys[i]}" r="3" ` +
          `fill="${s.style.stroke}"/>`,
      );
    }
  }
  return parts.join("\n");
}

export interface AxisLabels {
  x: string;
  y: string;
  title: string;
}

/** Frame, grid lines, tick labels, axis titles and figure title. */
export function frameMarkup(sx: Scale, sy: Scale, labels: AxisLabels): string {
  const { top, right, bottom, left } = MARGIN;
  const x0 = left;
  const x1 = WIDTH - right;
  const y0 = HEIGHT - bottom;
  const y1 = top;
  const parts: string[] = [];
  parts.push(
    `<rect x="${px(x0)}" y="${px(y1)}" width="${px(x1 - x0)}" height="${px(y0 - y1)}" ` +
      `fill="none" stroke="#333333" stroke-width="1"/>`,
  );
  for (const t of sx.ticks) {
    const x = px(sx(t));
    parts.push(
      `<line x1="${x}" y1="${px(y0)}" x2="${x}" y2="${px(y1)}" stroke="#dddddd" stroke-width="0.6"/>`,
      `<text x="${x}" y="${px(y0 + 18)}" text-anchor="middle" font-size="11">${sx.label(t)}</text>`,
    );
  }
  for (const t of sy.ticks) {
    const y = px(sy(t));
    parts.push(
      `<line x1="${px(x0)}" y1="${y}" x2="${px(x1)}" y2="${y}" stroke="#dddddd" stroke-width="0.6"/>`,
      `<text x="${px(x0 - 8)}" y="${px(sy(t) + 4)}" text-anchor="end" font-size="11">${sy.label(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${px((x0 + x1) / 2)}" y="${px(HEIGHT - 12)}" text-anchor="middle" font-size="13">${labels.x}</text>`,
    `<text x="18" y="${px((y0 + y1) / 2)}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 18 ${px((y0 + y1) / 2)})">${labels.y}</text>`,
    `<text x="${px((x0 + x1) / 2)}" y="22" text-anchor="middle" font-size="15">${labels.title}</text>`,
  );
  return parts.join("\n");
}

/** Legend swatches in the top-right corner of the plot area. */
export function legendMarkup(series: Series[]): string {
  const x = WIDTH - MARGIN.right - 150;
  const parts: string[] = [];
  series.forEach((s, i) => {
    const y = MARGIN.top + 14 + 18 * i;
    const dash = s.style.dash ? ` stroke-dasharray="${s.style.dash}"` : "";
    parts.push(
      `<line x1="${px(x)}" y1="${px(y)}" x2="${px(x + 26)}" y2="${px(y)}" ` +
        `stroke="${s.style.stroke}" stroke-width="1.8"${dash}/>`,
      `<text x="${px(x + 32)}" y="${px(y + 4)}" font-size="11">${s.name}</text>`,
    );
  });
  return parts.join("\n");
}

export function document(body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>\n` +
    body +
    "\n</svg>\n"
  );
}
