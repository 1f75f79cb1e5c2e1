// Session controller: holds the latest server snapshot and funnels every
// decision through one code path (clicks, slider and the era-1 continue all
// end up in submit()). At most one decision request is in flight.

import { ApiClient } from "./api.js";
import type { ClairvoyantResponse, ObjectiveSpace, SessionState } from "./types.js";
import { dRankIndex, decisionMode } from "./viewmodel.js";

export class SessionController {
  state: SessionState | null = null;
  previewIndex: number | null = null;
  space: ObjectiveSpace = "era";
  showClairvoyant = false;
  clairvoyant: ClairvoyantResponse | null = null;
  hoverIndex: number | null = null;
  private inflight = false;

  constructor(
    public api: ApiClient,
    public sessionId: string,
  ) {}

  async refresh(): Promise<SessionState> {
    this.state = await this.api.getState(this.sessionId);
    return this.state;
  }

  mode(): "none" | "continue" | "choose" {
    return decisionMode(this.state?.front ?? null);
  }

  /** d-slider preview: which rank the current front would resolve to. */
  previewForD(d: number): number | null {
    const m = this.state?.front?.length ?? 0;
    return m ? dRankIndex(m, d) : null;
  }

  /** Submit the decision for the clicked front point (1-based index). */
  async selectPoint(index: number): Promise<boolean> {
    const front = this.state?.front;
    if (!front || this.state?.state !== "awaiting_decision") return false;
    if (index < 1 || index > front.length) return false;
    return this.submit({ index });
  }

  async selectByD(d: number): Promise<boolean> {
    if (this.state?.state !== "awaiting_decision") return false;
    return this.submit({ d });
  }

  /** Era-1 singleton: the only possible decision. */
  async continueSingleton(): Promise<boolean> {
    if (this.mode() !== "continue") return false;
    return this.submit({ index: 1 });
  }

  private async submit(choice: { index?: number; d?: number }): Promise<boolean> {
    if (this.inflight) return false;
    this.inflight = true;
    try {
      await this.api.submitDecision(this.sessionId, choice);
      this.previewIndex = null;
      this.hoverIndex = null;
      return true;
    } finally {
      this.inflight = false;
    }
  }

  async toggleClairvoyant(): Promise<void> {
    this.showClairvoyant = !this.showClairvoyant;
    if (this.showClairvoyant && this.clairvoyant?.status !== "ready") {
      this.clairvoyant = await this.api.getClairvoyant(this.sessionId);
    }
  }

  async pollClairvoyant(): Promise<void> {
    if (this.showClairvoyant && this.clairvoyant?.status === "computing") {
      this.clairvoyant = await this.api.getClairvoyant(this.sessionId);
    }
  }

  /** Active customer ids of the front tour to preview on the map. */
  plannedTour(): number[] | null {
    const s = this.state;
    if (!s) return null;
    if (s.state === "finished" && s.final_tour) {
      return s.final_tour.slice(1, -1).map((t) => t.id);
    }
    const target = this.hoverIndex ?? this.previewIndex;
    const tours = s.front_tours;
    if (!tours || tours.length === 0) return null;
    const hit = tours.find((t) => t.index === target);
    return (hit ?? tours[0]).active;
  }
}
