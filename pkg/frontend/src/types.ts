// Payload shapes of the session API.

export interface InstanceInfo {
  name: string;
  n: number;
  n_mandatory: number;
  n_dynamic: number;
  topology: string;
  n_eras: number;
  delta: number;
}

export interface FrontPoint {
  index: number; // 1-based rank in the tour-length-sorted front
  tour_length: number;
  unvisited: number;
  unvisited_apost: number;
}

export interface CustomerInfo {
  id: number;
  x: number;
  y: number;
  kind: "SD" | "ED" | "M" | "D";
  request_time: number;
}

export interface DecisionInfo {
  era: number;
  index: number; // 1-based
  d: number | null;
}

export interface TourStop {
  position: number;
  id: number;
  arrival: number;
}

export interface FrontTour {
  index: number;
  active: number[];
}

export type SessionPhase = "optimizing" | "awaiting_decision" | "finished" | "aborted";

export interface SessionState {
  id: string;
  state: SessionPhase;
  era_index: number;
  n_eras: number;
  delta: number;
  generation: number;
  generations_per_era: number;
  appeared: number;
  total_dynamic: number;
  upper_bound: number;
  committed: { prefix: number[]; era_start_time: number };
  decisions: DecisionInfo[];
  front: FrontPoint[] | null;
  front_tours?: FrontTour[];
  customers: CustomerInfo[];
  final_tour?: TourStop[];
}

export interface ClairvoyantResponse {
  status: "computing" | "ready";
  front: { tour_length: number; unvisited: number }[] | null;
}

export interface SessionRequest {
  instance?: string;
  instance_text?: string;
  n_eras?: number;
  delta?: number;
  generations?: number;
  mu?: number;
  lambda_?: number;
  seed?: number;
  clairvoyant_repeats?: number;
}

export type ObjectiveSpace = "era" | "apost";
