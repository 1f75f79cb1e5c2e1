// DOM wiring: session setup form, 500 ms polling while the optimizer runs,
// and rendering of the era dashboard plus tour map.

import { ApiClient } from "./api.js";
import { SessionController } from "./controller.js";
import { renderScatter, renderTourMap } from "./scatter.js";
import type { ObjectiveSpace } from "./types.js";
import { breadcrumb, progressLabel, scatterModel, tourModel } from "./viewmodel.js";

const POLL_MS = 500;

const $ = <T extends HTMLElement>(sel: string): T => {
  const el = document.querySelector(sel);
  if (!el) throw new Error(`missing element ${sel}`);
  return el as T;
};

const api = new ApiClient("");
let controller: SessionController | null = null;
let timer: number | null = null;

async function populateInstances(): Promise<void> {
  const select = $<HTMLSelectElement>("#instance-select");
  const infos = await api.listInstances();
  select.innerHTML = infos
    .map(
      (i) =>
        `<option value="${i.name}">${i.name} (N=${i.n}, ${i.topology}, ${i.n_eras} eras)</option>`,
    )
    .join("");
}

async function startSession(): Promise<void> {
  const name = $<HTMLSelectElement>("#instance-select").value;
  const generations = Number($<HTMLInputElement>("#generations").value) || 300;
  const seed = Number($<HTMLInputElement>("#seed").value) || 0;
  const sid = await api.createSession({ instance: name, generations, seed });
  controller = new SessionController(api, sid);
  $("#setup").classList.add("hidden");
  $("#dashboard").classList.remove("hidden");
  schedule(0);
}

function schedule(ms: number): void {
  if (timer !== null) window.clearTimeout(timer);
  timer = window.setTimeout(tick, ms);
}

async function tick(): Promise<void> {
  if (!controller) return;
  try {
    await controller.refresh();
    await controller.pollClairvoyant();
  } catch (err) {
    $("#status").textContent = `connection error: ${err}`;
    schedule(2 * POLL_MS);
    return;
  }
  render();
  const s = controller.state!;
  if (s.state === "optimizing") schedule(POLL_MS);
  else if (s.state === "awaiting_decision") schedule(4 * POLL_MS);
}

function render(): void {
  if (!controller?.state) return;
  const s = controller.state;
  $("#status").textContent = progressLabel(s);
  $("#breadcrumb").textContent = breadcrumb(s.decisions) || "no decisions yet";
  $("#era-label").textContent =
    s.state === "finished"
      ? `final tour after era ${s.n_eras}`
      : `era ${s.era_index} of ${s.n_eras}`;

  const scatterBox = $("#scatter-box");
  if (s.front) {
    const model = scatterModel(s.front, s.upper_bound, {
      space: controller.space,
      previewIndex: controller.previewIndex,
      selectedIndex: controller.hoverIndex,
      clairvoyant:
        controller.showClairvoyant && controller.clairvoyant?.status === "ready"
          ? controller.clairvoyant.front
          : null,
    });
    scatterBox.innerHTML = renderScatter(model);
  } else {
    scatterBox.innerHTML = `<p class="placeholder">optimizing era ${s.era_index}…</p>`;
  }

  $("#map-box").innerHTML = renderTourMap(tourModel(s, controller.plannedTour()));

  const mode = controller.mode();
  const waiting = s.state === "awaiting_decision";
  $<HTMLButtonElement>("#continue-btn").classList.toggle(
    "hidden",
    !(waiting && mode === "continue"),
  );
  $("#choose-controls").classList.toggle("hidden", !(waiting && mode === "choose"));
  $("#finished-controls").classList.toggle("hidden", s.state !== "finished");
  if (s.state === "finished") {
    $<HTMLAnchorElement>("#trace-link").href = api.traceUrl(s.id);
  }
}

function wire(): void {
  $("#start-btn").addEventListener("click", () => {
    startSession().catch((err) => ($("#status").textContent = String(err)));
  });

  $("#continue-btn").addEventListener("click", () => {
    controller?.continueSingleton().then(() => schedule(0));
  });

  // event delegation: clicking a front point submits its 1-based index
  $("#scatter-box").addEventListener("click", (ev) => {
    const target = (ev.target as Element).closest(".front-point");
    if (!target || !controller) return;
    const index = Number(target.getAttribute("data-index"));
    controller.selectPoint(index).then((ok) => ok && schedule(0));
  });

  $("#scatter-box").addEventListener("mouseover", (ev) => {
    const target = (ev.target as Element).closest(".front-point");
    if (!target || !controller) return;
    controller.hoverIndex = Number(target.getAttribute("data-index"));
    render();
  });

  const slider = $<HTMLInputElement>("#d-slider");
  slider.addEventListener("input", () => {
    if (!controller) return;
    controller.previewIndex = controller.previewForD(Number(slider.value));
    $("#d-value").textContent = Number(slider.value).toFixed(2);
    render();
  });
  $("#d-submit").addEventListener("click", () => {
    controller?.selectByD(Number(slider.value)).then((ok) => ok && schedule(0));
  });

  $("#space-toggle").addEventListener("change", (ev) => {
    if (!controller) return;
    controller.space = ($<HTMLSelectElement>("#space-toggle").value as ObjectiveSpace) ?? "era";
    render();
  });

  $("#clairvoyant-toggle").addEventListener("change", () => {
    controller?.toggleClairvoyant().then(render);
  });
}

document.addEventListener("DOMContentLoaded", () => {
  wire();
  populateInstances().catch((err) => ($("#status").textContent = String(err)));
});
