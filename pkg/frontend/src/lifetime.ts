/** Lifetime figure: lifetime ratio versus effective throughput, one curve per protocol. */

import { LIFETIME_COLUMNS, Row, SchemaError, parseCsv, toNumber } from "./csv.js";
import * as svg from "./svg.js";

export function renderLifetime(text: string, source = "input"): string {
  const rows = parseCsv(text, LIFETIME_COLUMNS, source);
  if (rows.length === 0) {
    throw new SchemaError(`${source}: no data rows to plot`);
  }
  const byProtocol = new Map<string, Row[]>();
  for (const row of rows) {
    if (!byProtocol.has(row.protocol)) byProtocol.set(row.protocol, []);
    byProtocol.get(row.protocol)!.push(row);
  }
  const protocols = [...byProtocol.keys()]; // first-appearance order (Direct first)

  const xs = rows.map((r) => toNumber(r, "throughput"));
  const ys = rows.map((r) => toNumber(r, "lifetime_ratio"));
  const xDomain = svg.extent(xs);
  const yDomain = svg.extent([...ys, 1.0]);
  const ax = svg.axes(xDomain, yDomain);

  const body: string[] = [];
  body.push(
    ...svg.axisLayer(
      ax,
      xDomain,
      yDomain,
      "effective throughput (nats per time unit)",
      "lifetime relative to Direct Link",
    ),
  );

  // unit-ratio guide line
  const yUnit = ax.y(1.0);
  body.push(
    `<line class="guide" x1="${svg.px(svg.MARGIN.left)}" y1="${svg.px(yUnit)}" ` +
      `x2="${svg.px(svg.MARGIN.left + svg.PLOT_W)}" y2="${svg.px(yUnit)}" ` +
      `stroke="#999" stroke-dasharray="4 3"/>`,
  );

  protocols.forEach((protocol, index) => {
    const color = svg.PALETTE[index % svg.PALETTE.length];
    const points = byProtocol
      .get(protocol)!
      .map((r) => [toNumber(r, "throughput"), toNumber(r, "lifetime_ratio")] as [number, number])
      .sort((a, b) => a[0] - b[0]);
    body.push(
      `<path class="curve" id="curve-${index}" d="${svg.polyline(points, ax)}" fill="none" ` +
        `stroke="${color}" stroke-width="1.8"/>`,
    );
    for (const [x, y] of points) {
      body.push(
        `<circle class="point" cx="${svg.px(ax.x(x))}" cy="${svg.px(ax.y(y))}" r="3" fill="${color}"/>`,
      );
    }
    body.push(
      `<text class="legend" x="${svg.px(svg.WIDTH - svg.MARGIN.right + 14)}" ` +
        `y="${svg.px(svg.MARGIN.top + 16 + 18 * index)}" font-size="12" fill="${color}">` +
        `${protocol}</text>`,
    );
  });

  return svg.document("Network lifetime versus effective throughput", body);
}
