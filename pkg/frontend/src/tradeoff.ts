/** Tradeoff figure: bit-cost increase versus throughput gain, one curve per H. */

import { METRICS_COLUMNS, Row, SchemaError, mean, parseCsv, toNumber } from "./csv.js";
import * as svg from "./svg.js";

interface CellAggregate {
  protocol: string;
  helpers: string; // H column as written (e.g. "1", "inf", "" for references)
  batch: number; // Q, NaN for references
  throughput: number;
  maxBitCost: number;
}

/** Seed-averaged aggregate per protocol cell, from the node_id = ALL rows. */
export function aggregateCells(rows: Row[]): CellAggregate[] {
  const groups = new Map<string, { rows: Row[]; protocol: string; helpers: string; batch: number }>();
  for (const row of rows) {
    if (row.node_id !== "ALL") continue;
    const key = `${row.protocol}|${row.H}|${row.Q}`;
    if (!groups.has(key)) {
      groups.set(key, {
        rows: [],
        protocol: row.protocol,
        helpers: row.H,
        batch: row.Q === "" ? NaN : Number(row.Q),
      });
    }
    groups.get(key)!.rows.push(row);
  }
  const cells: CellAggregate[] = [];
  for (const group of groups.values()) {
    cells.push({
      protocol: group.protocol,
      helpers: group.helpers,
      batch: group.batch,
      throughput: mean(group.rows.map((r) => toNumber(r, "throughput"))),
      maxBitCost: mean(group.rows.map((r) => toNumber(r, "bit_cost"))),
    });
  }
  return cells;
}

export function renderTradeoff(text: string, source = "input"): string {
  const rows = parseCsv(text, METRICS_COLUMNS, source);
  const cells = aggregateCells(rows);
  if (cells.length === 0) {
    throw new SchemaError(`${source}: no aggregate (node_id = ALL) rows to plot`);
  }
  const direct = cells.find((c) => c.protocol === "direct");
  if (!direct) {
    throw new SchemaError(`${source}: no Direct Link rows to normalize against`);
  }
  const coop = cells.find((c) => c.protocol === "coopmac");

  const gain = (c: CellAggregate) => c.throughput / direct.throughput;
  const increase = (c: CellAggregate) => c.maxBitCost / direct.maxBitCost;

  const curves = new Map<string, CellAggregate[]>();
  for (const cell of cells.filter((c) => c.protocol === "fairmac")) {
    if (!curves.has(cell.helpers)) curves.set(cell.helpers, []);
    curves.get(cell.helpers)!.push(cell);
  }
  for (const points of curves.values()) {
    points.sort((a, b) => a.batch - b.batch);
  }
  const helperKeys = [...curves.keys()].sort();

  const xs: number[] = [gain(direct)];
  const ys: number[] = [increase(direct)];
  if (coop) {
    xs.push(gain(coop));
    ys.push(increase(coop));
  }
  for (const points of curves.values()) {
    for (const c of points) {
      xs.push(gain(c));
      ys.push(increase(c));
    }
  }
  const ax = svg.axes(svg.extent(xs), svg.extent(ys));

  const body: string[] = [];
  body.push(
    ...svg.axisLayer(
      ax,
      svg.extent(xs),
      svg.extent(ys),
      "throughput gain vs Direct Link",
      "max bit-cost increase vs Direct Link",
    ),
  );

  helperKeys.forEach((helpers, index) => {
    const points = curves.get(helpers)!;
    const color = svg.PALETTE[index % svg.PALETTE.length];
    const path = svg.polyline(
      points.map((c) => [gain(c), increase(c)]),
      ax,
    );
    body.push(
      `<path class="curve" id="curve-H${helpers}" d="${path}" fill="none" ` +
        `stroke="${color}" stroke-width="1.8"/>`,
    );
    for (const c of points) {
      const x = ax.x(gain(c));
      const y = ax.y(increase(c));
      body.push(
        `<circle class="point" cx="${svg.px(x)}" cy="${svg.px(y)}" r="3.5" fill="${color}"/>`,
      );
      body.push(
        `<text class="point-label" x="${svg.px(x + 6)}" y="${svg.px(y - 6)}" ` +
          `font-size="10" fill="${color}">Q=${c.batch}</text>`,
      );
    }
    body.push(
      `<text class="legend" x="${svg.px(svg.WIDTH - svg.MARGIN.right + 14)}" ` +
        `y="${svg.px(svg.MARGIN.top + 16 + 18 * index)}" font-size="12" fill="${color}">` +
        `fairMAC H=${helpers}</text>`,
    );
  });

  // reference strategies as standalone markers
  const refs: Array<[string, CellAggregate]> = [["direct", direct]];
  if (coop) refs.push(["coopmac", coop]);
  refs.forEach(([name, cell], index) => {
    const x = ax.x(gain(cell));
    const y = ax.y(increase(cell));
    body.push(
      `<rect class="ref-marker" id="ref-${name}" x="${svg.px(x - 4)}" y="${svg.px(y - 4)}" ` +
        `width="8" height="8" fill="#000" transform="rotate(45 ${svg.px(x)} ${svg.px(y)})"/>`,
    );
    body.push(
      `<text class="ref-label" x="${svg.px(x + 8)}" y="${svg.px(y + 4)}" font-size="11">` +
        `${name === "direct" ? "Direct Link" : "CoopMAC"}</text>`,
    );
    void index;
  });

  return svg.document("Throughput gain and bit-cost increase", body);
}
