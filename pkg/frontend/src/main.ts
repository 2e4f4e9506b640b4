/**
 * Wiring: one WebSocket, one canvas, keyboard in, frames out.
 * Rendering happens on frame arrival, capped at the display refresh.
 */

import { keyToAction } from "./input.js";
import { parseFrame } from "./protocol.js";
import { drawPlan, planFrame } from "./render.js";
import {
  applyFrame, echoInput, initialViewModel, setConnection, toggleOverlay,
  toggleRunning, ViewModel,
} from "./state.js";

const canvas = document.getElementById("game") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;

let vm: ViewModel = initialViewModel();
let dirty = true;

function update(next: ViewModel): void {
  vm = next;
  if (!dirty) {
    dirty = true;
    requestAnimationFrame(render);
  }
}

function render(): void {
  dirty = false;
  const plan = planFrame(vm);
  if (canvas.width !== plan.width || canvas.height !== plan.height) {
    canvas.width = plan.width;
    canvas.height = plan.height;
  }
  drawPlan(ctx, plan);
}

const proto = location.protocol === "https:" ? "wss" : "ws";
const participant =
  new URLSearchParams(location.search).get("participant") ?? "anon";
const ws = new WebSocket(
  `${proto}://${location.host}/session?participant=${participant}`,
);

ws.onopen = () => update(setConnection(vm, "open"));
ws.onclose = () => update(setConnection(vm, "closed"));
ws.onmessage = (ev) => {
  const frame = parseFrame(String(ev.data));
  if (frame) update(applyFrame(vm, frame));
};

document.addEventListener("keydown", (ev) => {
  const action = keyToAction(ev.key, ev.repeat, vm.running);
  if (!action) return;
  ev.preventDefault();
  if (action.kind === "overlay") {
    update(toggleOverlay(vm));
    return;
  }
  if (ws.readyState !== WebSocket.OPEN) return;
  ws.send(JSON.stringify(action.message));
  if (action.kind === "control") {
    update(toggleRunning(vm));
  } else {
    update(echoInput(vm, action.message.dir));
  }
});

dirty = false;
render();
