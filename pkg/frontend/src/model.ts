/** Pure projections from service documents to view models.
 *
 * The engine is the sole authority: nothing here evaluates rules. The board
 * renders exactly the parcels and legal actions the state document lists,
 * and a rebuilt projection from the same documents is identical (resync
 * safety).
 */

import {
  ActionDoc,
  IndicatorField,
  INDICATOR_FIELDS,
  LogEvent,
  ParcelView,
  ReportDoc,
  SessionView,
  Species,
  StateView,
  StreamEvent,
} from "./types.js";

export const BOARD_COLUMNS = 8;
export const BOARD_ROWS = 5;
export const MAX_PINS = 5;

export const SPECIES_COLOR: Record<Species, string> = {
  pine: "red",
  spruce: "green",
  birch: "white",
};

/** Sticky-note palette, one per seat. */
export const SEAT_COLORS = ["#f6d55c", "#3caea3", "#ed553b", "#20639b"];

export const PHASE_LABELS: Record<string, string> = {
  y0_planting: "Year 0 — Planting",
  risk_0: "Risk draw",
  y30_thinning: "Year 30 — First thinning",
  risk_30: "Risk draw",
  y45_thinning: "Year 45 — Second thinning",
  risk_45: "Risk draw",
  y60_felling: "Year 60 — Final felling",
  scoring: "Scoring",
  finished: "Finished",
};

export interface BoardCell {
  parcel: number;
  row: number;
  column: number;
  seatColor: string | null;
  managerName: string | null;
  species: Species | null;
  speciesColor: string | null;
  pins: number;
  insured: boolean;
  pendingDowngrade: boolean;
  decided: string | null;
}

export interface ActionOption {
  label: string;
  action: ActionDoc;
  needsSpecies: boolean;
  needsPrice: boolean;
}

export interface BoardModel {
  phaseLabel: string;
  year: number;
  priceModifier: number;
  players: { seat: number; name: string; cash: number; passed: boolean; color: string }[];
  cells: BoardCell[];
  deckRemaining: number;
  discard: string[];
  finished: boolean;
}

export function projectBoard(session: SessionView): BoardModel {
  const state = requireState(session);
  const nameOf = new Map(state.players.map((p) => [p.id, p.name]));
  const cells = state.parcels.map((parcel) => toCell(parcel, nameOf));
  return {
    phaseLabel: PHASE_LABELS[state.phase] ?? state.phase,
    year: state.year,
    priceModifier: state.price_modifier,
    players: state.players.map((p) => ({
      seat: p.seat,
      name: p.name,
      cash: p.cash,
      passed: p.passed,
      color: SEAT_COLORS[p.seat % SEAT_COLORS.length],
    })),
    cells,
    deckRemaining: state.deck.remaining,
    discard: state.deck.discard,
    finished: state.phase === "finished",
  };
}

function toCell(parcel: ParcelView, nameOf: Map<number, string>): BoardCell {
  return {
    parcel: parcel.id,
    row: Math.floor(parcel.id / BOARD_COLUMNS),
    column: parcel.id % BOARD_COLUMNS,
    seatColor:
      parcel.manager === null ? null : SEAT_COLORS[parcel.manager % SEAT_COLORS.length],
    managerName: parcel.manager === null ? null : nameOf.get(parcel.manager) ?? null,
    species: parcel.species,
    speciesColor: parcel.species ? SPECIES_COLOR[parcel.species] : null,
    pins: Math.max(0, Math.min(MAX_PINS, parcel.pins)),
    insured: parcel.insured,
    pendingDowngrade: parcel.pending_downgrade,
    decided: parcel.decided,
  };
}

function requireState(session: SessionView): StateView {
  if (!session.state) {
    throw new Error(`session ${session.id} has no state yet (status ${session.status})`);
  }
  return session.state;
}

/** Actions the engine listed for one parcel, ready for the action panel. */
export function parcelActions(state: StateView, parcel: number): ActionOption[] {
  const options = state.legal_actions ?? [];
  return options
    .filter((a) => a.parcel === parcel)
    .map((a) => ({
      label: actionLabel(a),
      action: a,
      needsSpecies: a.kind === "plant",
      needsPrice: a.kind === "lease_offer",
    }));
}

export function tableActions(state: StateView): ActionOption[] {
  const options = state.legal_actions ?? [];
  return options
    .filter((a) => a.parcel === undefined || a.parcel === null)
    .map((a) => ({
      label: actionLabel(a),
      action: a,
      needsSpecies: false,
      needsPrice: false,
    }));
}

export function actionLabel(action: ActionDoc): string {
  switch (action.kind) {
    case "plant":
      return "Plant";
    case "buy_insurance":
      return "Insure";
    case "lease_offer":
      return "Offer lease";
    case "lease_accept":
      return `Accept lease #${action.offer}`;
    case "buy_parcel":
      return "Buy parcel";
    case "harvest":
      return "Harvest";
    case "skip":
      return "Skip";
    case "pass":
      return "Pass";
  }
}

/** Card reveals in stream order, resumable by sequence number. */
export interface CardReveal {
  seq: number;
  phase: string;
  player: number;
  card: string;
}

export function cardReveals(events: StreamEvent[], afterSeq = 0): CardReveal[] {
  const reveals: CardReveal[] = [];
  for (const entry of events) {
    if (entry.seq <= afterSeq || entry.kind !== "log") continue;
    const event: LogEvent = entry.event;
    if (event.type === "card_drawn") {
      reveals.push({ seq: entry.seq, phase: event.phase, player: event.player, card: event.card });
    }
  }
  return reveals;
}

export function lastSeq(events: StreamEvent[]): number {
  return events.length ? events[events.length - 1].seq : 0;
}

/** Monotone check for the gap-free stream contract. */
export function streamIsGapFree(events: StreamEvent[]): boolean {
  return events.every((e, i) => e.seq === (i === 0 ? e.seq : events[i - 1].seq + 1));
}

// ---------------------------------------------------------------------------
// Score screen

export interface ScoreBar {
  field: IndicatorField;
  player: string;
  scaled: number; // plotted verbatim on a 0..100 axis
  raw: number;
}

export interface ScoreModel {
  source: string;
  players: string[];
  bars: ScoreBar[];
  rawRows: { field: IndicatorField; values: number[] }[];
  cashTimeline: { player: string; points: { year: number; balance: number }[] }[];
  axisMax: 100;
}

export function projectScore(report: ReportDoc, startCash: number): ScoreModel {
  const players = report.players.map((p) => p.name);
  const bars: ScoreBar[] = [];
  for (const field of INDICATOR_FIELDS) {
    for (const entry of report.players) {
      bars.push({
        field,
        player: entry.name,
        scaled: entry.scaled[field],
        raw: entry.raw[field],
      });
    }
  }
  return {
    source: report.source,
    players,
    bars,
    rawRows: INDICATOR_FIELDS.map((field) => ({
      field,
      values: report.players.map((p) => p.raw[field]),
    })),
    cashTimeline: report.players.map((entry) => ({
      player: entry.name,
      points: cashPoints(entry.cash_flows, startCash),
    })),
    axisMax: 100,
  };
}

function cashPoints(
  flows: { year: number; amount: number }[],
  startCash: number,
): { year: number; balance: number }[] {
  const byYear = new Map<number, number>();
  for (const flow of flows) {
    byYear.set(flow.year, (byYear.get(flow.year) ?? 0) + flow.amount);
  }
  let balance = startCash;
  const points = [{ year: 0, balance: startCash }];
  for (const year of [0, 30, 45, 60]) {
    if (byYear.has(year)) {
      balance += byYear.get(year)!;
    }
    points.push({ year, balance });
  }
  return points;
}
