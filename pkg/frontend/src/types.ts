/** Mirrors of the service's documented JSON schemas (docs/formats.md). */

export type Species = "pine" | "spruce" | "birch";

export type Phase =
  | "y0_planting"
  | "risk_0"
  | "y30_thinning"
  | "risk_30"
  | "y45_thinning"
  | "risk_45"
  | "y60_felling"
  | "scoring"
  | "finished";

export type ActionKind =
  | "plant"
  | "buy_insurance"
  | "lease_offer"
  | "lease_accept"
  | "buy_parcel"
  | "harvest"
  | "skip"
  | "pass";

export interface ActionDoc {
  kind: ActionKind;
  actor?: number;
  parcel?: number;
  species?: Species;
  price?: number;
  offer?: number;
}

export interface PlayerView {
  id: number;
  seat: number;
  name: string;
  cash: number;
  owned: number[];
  managed: number[];
  passed: boolean;
}

export interface ParcelView {
  id: number;
  owner: number | null;
  manager: number | null;
  species: Species | null;
  trees: number;
  pins: number;
  insured: boolean;
  pending_downgrade: boolean;
  decided: string | null;
}

export interface LeaseOfferView {
  id: number;
  parcel: number;
  offerer: number;
  price: number;
  open: boolean;
}

export interface StateView {
  format: string;
  phase: Phase;
  year: number;
  price_modifier: number;
  players: PlayerView[];
  parcels: ParcelView[];
  deck: { remaining: number; discard: string[] };
  lease_offers: LeaseOfferView[];
  event_count: number;
  digest: string;
  legal_actions?: ActionDoc[];
}

export interface SessionView {
  id: string;
  status: "lobby" | "active" | "finished";
  seats: { seat: number; name: string }[];
  players_expected: number;
  event_seq: number;
  state?: StateView;
}

export type StreamEvent =
  | { seq: number; kind: "joined"; seat: number; name: string }
  | { seq: number; kind: "started"; players: number }
  | { seq: number; kind: "log"; event: LogEvent }
  | { seq: number; kind: "finished"; report_available: boolean };

export type LogEvent =
  | ({ type: "action"; phase: Phase } & ActionDoc)
  | { type: "card_drawn"; phase: Phase; player: number; card: string }
  | { type: "phase_advanced"; to: Phase };

export const INDICATOR_FIELDS = [
  "tree_biomass_carbon",
  "total_soil_carbon",
  "ecosystem_carbon",
  "wood_products_carbon",
  "timber",
  "deadwood",
  "soil_water",
  "net_present_value",
] as const;

export type IndicatorField = (typeof INDICATOR_FIELDS)[number];

export type IndicatorDoc = Record<IndicatorField, number>;

export interface CashFlowDoc {
  year: number;
  amount: number;
  kind: string;
}

export interface ReportPlayer {
  id: number;
  seat: number;
  name: string;
  raw: IndicatorDoc;
  scaled: IndicatorDoc;
  cash: number;
  cash_flows: CashFlowDoc[];
}

export interface ReportDoc {
  format: string;
  source: "surrogate" | "imported";
  log_digest: string;
  coefficients: Record<string, number>;
  directions: Record<string, string>;
  units: Record<string, string>;
  players: ReportPlayer[];
}

export type CardTexts = Record<string, { title: string; body: string }>;
