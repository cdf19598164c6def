/** Minimal deterministic SVG chart scaffolding (no timestamps, fixed styling). */

export interface Extent {
  min: number;
  max: number;
}

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { top: 36, right: 180, bottom: 56, left: 72 };

export const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
export const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"];

/** Fixed-precision pixel coordinate so output bytes depend only on the data. */
export function px(value: number): string {
  return value.toFixed(2);
}

export function extent(values: number[], padFraction = 0.08): Extent {
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  const pad = (max - min) * padFraction;
  return { min: min - pad, max: max + pad };
}

export function scale(domain: Extent, rangeMin: number, rangeMax: number) {
  const span = domain.max - domain.min;
  return (value: number) => rangeMin + ((value - domain.min) / span) * (rangeMax - rangeMin);
}

export function tickValues(domain: Extent, count = 5): number[] {
  const step = (domain.max - domain.min) / (count - 1);
  return Array.from({ length: count }, (_, i) => domain.min + i * step);
}

export function fmtTick(value: number): string {
  return Number(value.toPrecision(3)).toString();
}

export interface Axes {
  x: (value: number) => number;
  y: (value: number) => number;
}

export function axes(xDomain: Extent, yDomain: Extent): Axes {
  return {
    x: scale(xDomain, MARGIN.left, MARGIN.left + PLOT_W),
    y: scale(yDomain, MARGIN.top + PLOT_H, MARGIN.top),
  };
}

export function axisLayer(
  ax: Axes,
  xDomain: Extent,
  yDomain: Extent,
  xLabel: string,
  yLabel: string,
): string[] {
  const x0 = MARGIN.left;
  const x1 = MARGIN.left + PLOT_W;
  const y0 = MARGIN.top + PLOT_H;
  const y1 = MARGIN.top;
  const parts = [
    `<g class="axes" stroke="#333" fill="none">`,
    `<line x1="${px(x0)}" y1="${px(y0)}" x2="${px(x1)}" y2="${px(y0)}"/>`,
    `<line x1="${px(x0)}" y1="${px(y0)}" x2="${px(x0)}" y2="${px(y1)}"/>`,
    `</g>`,
    `<g class="ticks" font-size="11" fill="#333" text-anchor="middle">`,
  ];
  for (const value of tickValues(xDomain)) {
    const x = ax.x(value);
    parts.push(`<line x1="${px(x)}" y1="${px(y0)}" x2="${px(x)}" y2="${px(y0 + 5)}" stroke="#333"/>`);
    parts.push(`<text x="${px(x)}" y="${px(y0 + 18)}">${fmtTick(value)}</text>`);
  }
  for (const value of tickValues(yDomain)) {
    const y = ax.y(value);
    parts.push(`<line x1="${px(x0 - 5)}" y1="${px(y)}" x2="${px(x0)}" y2="${px(y)}" stroke="#333"/>`);
    parts.push(`<text x="${px(x0 - 10)}" y="${px(y + 4)}" text-anchor="end">${fmtTick(value)}</text>`);
  }
  parts.push(`</g>`);
  parts.push(
    `<text class="axis-label" x="${px(MARGIN.left + PLOT_W / 2)}" y="${px(HEIGHT - 14)}" ` +
      `font-size="13" text-anchor="middle">${xLabel}</text>`,
  );
  parts.push(
    `<text class="axis-label" x="16" y="${px(MARGIN.top + PLOT_H / 2)}" font-size="13" ` +
      `text-anchor="middle" transform="rotate(-90 16 ${px(MARGIN.top + PLOT_H / 2)})">${yLabel}</text>`,
  );
  return parts;
}

export function polyline(points: Array<[number, number]>, ax: Axes): string {
  return points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"} ${px(ax.x(x))} ${px(ax.y(y))}`)
    .join(" ");
}

export function document(title: string, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    `<title>${title}</title>`,
    ...body,
    `</svg>`,
    ``,
  ].join("\n");
}
