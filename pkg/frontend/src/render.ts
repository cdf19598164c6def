/** Figure dispatch: one entry point per figure kind. */

import { SchemaError } from "./csv.js";
import { renderLifetime } from "./lifetime.js";
import { renderTradeoff } from "./tradeoff.js";

export type FigureKind = "tradeoff" | "lifetime";

export interface FigureSpec {
  kind: FigureKind;
  input: string; // CSV text
  source?: string; // name used in error messages
}

export function render(spec: FigureSpec): string {
  const source = spec.source ?? "input";
  if (spec.kind === "tradeoff") {
    return renderTradeoff(spec.input, source);
  }
  if (spec.kind === "lifetime") {
    return renderLifetime(spec.input, source);
  }
  throw new SchemaError(`unknown figure kind: ${String(spec.kind)}`);
}

export { SchemaError } from "./csv.js";
export { renderLifetime } from "./lifetime.js";
export { renderTradeoff } from "./tradeoff.js";
