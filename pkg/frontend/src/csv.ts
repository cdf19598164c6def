/** Parsing and schema validation for the simulator's CSV outputs. */

export class SchemaError extends Error {}

/** Exact column order of the per-node metrics CSV written by the simulator. */
export const METRICS_COLUMNS = [
  "protocol",
  "H",
  "Q",
  "P",
  "tau",
  "sigma",
  "snr_db",
  "seed",
  "node_id",
  "delivered_nats",
  "transmit_time",
  "clock",
  "throughput",
  "avg_power",
  "bit_cost",
  "lifetime",
] as const;

/** Columns of the lifetime-study CSV. */
export const LIFETIME_COLUMNS = [
  "protocol",
  "snr_db",
  "throughput",
  "lifetime",
  "lifetime_ratio",
] as const;

export type Row = Record<string, string>;

/**
 * Parse a comma-separated file against a required header. The simulator never
 * quotes fields, so a plain split is exact. Missing columns are reported by
 * name; extra or reordered columns are also schema errors.
 */
export function parseCsv(text: string, required: readonly string[], source = "input"): Row[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${source}: empty CSV, missing required column "${required[0]}"`);
  }
  const header = lines[0].split(",");
  for (const column of required) {
    if (!header.includes(column)) {
      throw new SchemaError(`${source}: missing required column "${column}"`);
    }
  }
  if (header.length !== required.length) {
    const extra = header.filter((name) => !required.includes(name));
    throw new SchemaError(`${source}: unexpected column "${extra[0] ?? header[0]}"`);
  }
  for (let i = 0; i < required.length; i++) {
    if (header[i] !== required[i]) {
      throw new SchemaError(
        `${source}: column ${i} must be "${required[i]}", found "${header[i]}"`,
      );
    }
  }
  const rows: Row[] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(`${source}: row has ${parts.length} fields, expected ${header.length}`);
    }
    const row: Row = {};
    header.forEach((name, i) => (row[name] = parts[i]));
    rows.push(row);
  }
  return rows;
}

export function toNumber(row: Row, column: string): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`non-numeric value "${row[column]}" in column "${column}"`);
  }
  return value;
}

export function mean(values: number[]): number {
  return values.reduce((acc, v) => acc + v, 0) / values.length;
}
