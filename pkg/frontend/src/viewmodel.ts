// Pure view logic: everything here is data-in/data-out so it can be tested
// without a DOM.

import type {
  DecisionInfo,
  FrontPoint,
  ObjectiveSpace,
  SessionState,
} from "./types.js";

export interface Scale {
  toPx(v: number): number;
  fromPx(px: number): number;
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return {
    toPx: (v) => r0 + ((v - d0) / span) * (r1 - r0),
    fromPx: (px) => d0 + ((px - r0) / (r1 - r0)) * span,
  };
}

/** Mirror of the server's rank rule: ceil(d*m) clamped to [1, m]. */
export function dRankIndex(m: number, d: number): number {
  if (m < 1) throw new Error("empty front");
  return Math.min(Math.max(Math.ceil(d * m), 1), m);
}

export function unvisitedIn(p: FrontPoint, space: ObjectiveSpace): number {
  return space === "era" ? p.unvisited : p.unvisited_apost;
}

export interface ScatterPoint {
  index: number;
  px: number;
  py: number;
  tourLength: number;
  unvisited: number;
  selected: boolean;
  previewed: boolean;
}

export interface ScatterModel {
  width: number;
  height: number;
  points: ScatterPoint[];
  clairvoyant: { px: number; py: number }[];
  upperBound: number;
  upperBoundY: number | null; // pixel y of the guide line, null if off-plot
  xTicks: { px: number; label: string }[];
  yTicks: { py: number; label: string }[];
}

export interface ScatterOptions {
  width?: number;
  height?: number;
  margin?: number;
  space?: ObjectiveSpace;
  previewIndex?: number | null;
  selectedIndex?: number | null;
  clairvoyant?: { tour_length: number; unvisited: number }[] | null;
}

/** Layout for the per-era front plot: tour length on x, unvisited on y,
 * the era's upper bound as a horizontal guide line. */
export function scatterModel(
  front: FrontPoint[],
  upperBound: number,
  opts: ScatterOptions = {},
): ScatterModel {
  const width = opts.width ?? 460;
  const height = opts.height ?? 320;
  const margin = opts.margin ?? 40;
  const space = opts.space ?? "era";
  const cl = opts.clairvoyant ?? [];

  const xs = front.map((p) => p.tour_length).concat(cl.map((p) => p.tour_length));
  const ys = front
    .map((p) => unvisitedIn(p, space))
    .concat(space === "apost" ? cl.map((p) => p.unvisited) : [])
    .concat([upperBound]);
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const pad = (x1 - x0 || 1) * 0.05;
  const sx = linearScale(x0 - pad, x1 + pad, margin, width - 10);
  const yMax = Math.max(...ys, 1);
  const sy = linearScale(0, yMax * 1.08, height - margin, 12);

  const points = front.map((p) => ({
    index: p.index,
    px: sx.toPx(p.tour_length),
    py: sy.toPx(unvisitedIn(p, space)),
    tourLength: p.tour_length,
    unvisited: unvisitedIn(p, space),
    selected: p.index === (opts.selectedIndex ?? null),
    previewed: p.index === (opts.previewIndex ?? null),
  }));

  const ubVisible = space === "era";
  return {
    width,
    height,
    points,
    clairvoyant:
      space === "apost"
        ? cl.map((p) => ({ px: sx.toPx(p.tour_length), py: sy.toPx(p.unvisited) }))
        : [],
    upperBound,
    upperBoundY: ubVisible ? sy.toPx(upperBound) : null,
    xTicks: ticks(x0, x1, 5).map((v) => ({ px: sx.toPx(v), label: v.toFixed(0) })),
    yTicks: ticks(0, yMax, 5).map((v) => ({ py: sy.toPx(v), label: v.toFixed(0) })),
  };
}

export function ticks(lo: number, hi: number, n: number): number[] {
  if (hi <= lo) return [lo];
  const step = (hi - lo) / (n - 1);
  return Array.from({ length: n }, (_, i) => lo + i * step);
}

/** Era-1 has a singleton front and therefore no real choice. */
export function decisionMode(front: FrontPoint[] | null): "none" | "continue" | "choose" {
  if (!front || front.length === 0) return "none";
  return front.length === 1 ? "continue" : "choose";
}

export function breadcrumb(decisions: DecisionInfo[]): string {
  return decisions
    .map((d) => `era ${d.era}: #${d.index}${d.d != null ? ` (d=${d.d})` : ""}`)
    .join(" → ");
}

export function progressLabel(s: SessionState): string {
  if (s.state === "optimizing") {
    return `era ${s.era_index}/${s.n_eras} · generation ${s.generation}/${s.generations_per_era}`;
  }
  if (s.state === "awaiting_decision") {
    return `era ${s.era_index}/${s.n_eras} · awaiting decision`;
  }
  return s.state;
}

export interface TourModel {
  width: number;
  height: number;
  markers: {
    id: number;
    px: number;
    py: number;
    kind: string;
    appeared: boolean;
    committed: boolean;
  }[];
  committedPath: { px: number; py: number }[];
  plannedPath: { px: number; py: number }[];
}

/** Map of the instance with the committed prefix and one planned tour. The
 * planned tour is the full depot-to-depot route of the highlighted solution. */
export function tourModel(
  state: SessionState,
  plannedActive: number[] | null,
  width = 460,
  height = 420,
): TourModel {
  const cs = state.customers;
  const xs = cs.map((c) => c.x);
  const ys = cs.map((c) => c.y);
  const sx = linearScale(Math.min(...xs), Math.max(...xs), 16, width - 16);
  const sy = linearScale(Math.min(...ys), Math.max(...ys), height - 16, 16);
  const byId = new Map(cs.map((c) => [c.id, c]));
  const now = state.committed.era_start_time;
  const committedSet = new Set(state.committed.prefix);

  const px = (id: number) => sx.toPx(byId.get(id)!.x);
  const py = (id: number) => sy.toPx(byId.get(id)!.y);

  const markers = cs.map((c) => ({
    id: c.id,
    px: sx.toPx(c.x),
    py: sy.toPx(c.y),
    kind: c.kind,
    appeared: c.kind !== "D" || c.request_time <= now,
    committed: committedSet.has(c.id),
  }));

  const committedIds = [1, ...state.committed.prefix];
  const committedPath = committedIds.map((id) => ({ px: px(id), py: py(id) }));

  let plannedPath: { px: number; py: number }[] = [];
  if (plannedActive) {
    const ids = [1, ...plannedActive, cs.length];
    plannedPath = ids.map((id) => ({ px: px(id), py: py(id) }));
  }
  return { width, height, markers, committedPath, plannedPath };
}
