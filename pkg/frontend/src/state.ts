/**
 * View model: a pure reduction of server frames plus two local toggles.
 *
 * No game logic lives here; the client renders exactly what the server
 * last said. Replaying one frame log always rebuilds the same model.
 */

import type { Dir, MazeFrame, OverFrame, ServerFrame, StateFrame } from "./protocol.js";

export type Connection = "connecting" | "open" | "closed";

export interface ViewModel {
  connection: Connection;
  maze: MazeFrame | null;
  state: StateFrame | null;
  over: OverFrame | null;
  error: string | null;
  overlayOn: boolean;
  running: boolean;      // mirrors the space-bar start/pause toggle
  lastInput: Dir | null; // input echo
}

export function initialViewModel(): ViewModel {
  return {
    connection: "connecting",
    maze: null,
    state: null,
    over: null,
    error: null,
    overlayOn: false,
    running: false,
    lastInput: null,
  };
}

export function applyFrame(vm: ViewModel, frame: ServerFrame): ViewModel {
  switch (frame.type) {
    case "maze":
      return { ...vm, maze: frame, state: null, over: null };
    case "state":
      return { ...vm, state: frame, over: frame.over ? vm.over : null };
    case "over":
      return { ...vm, over: frame, running: false };
    case "error":
      return { ...vm, error: frame.reason };
  }
}

export function setConnection(vm: ViewModel, connection: Connection): ViewModel {
  return { ...vm, connection };
}

export function toggleOverlay(vm: ViewModel): ViewModel {
  return { ...vm, overlayOn: !vm.overlayOn };
}

export function toggleRunning(vm: ViewModel): ViewModel {
  return { ...vm, running: !vm.running, over: vm.running ? vm.over : null };
}

export function echoInput(vm: ViewModel, dir: Dir): ViewModel {
  return { ...vm, lastInput: dir };
}
