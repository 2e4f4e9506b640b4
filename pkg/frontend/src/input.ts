/**
 * Keyboard mapping: arrows steer, space toggles start/pause, anything
 * else is ignored. Holding a key emits nothing past the first key-down.
 */

import type { ControlMessage, Dir, InputMessage } from "./protocol.js";
import { controlMessage, inputMessage } from "./protocol.js";

const ARROWS: Record<string, Dir> = {
  ArrowUp: "Up",
  ArrowDown: "Down",
  ArrowLeft: "Left",
  ArrowRight: "Right",
};

export type KeyAction =
  | { kind: "input"; message: InputMessage }
  | { kind: "control"; message: ControlMessage }
  | { kind: "overlay" };

/**
 * Map one key-down to an action, or null when the key means nothing.
 * `repeat` is the browser's auto-repeat flag; `running` picks between the
 * start and pause verbs for the space bar.
 */
export function keyToAction(
  key: string,
  repeat: boolean,
  running: boolean,
): KeyAction | null {
  if (repeat) return null;
  const dir = ARROWS[key];
  if (dir !== undefined) {
    return { kind: "input", message: inputMessage(dir) };
  }
  if (key === " ") {
    return { kind: "control", message: controlMessage(running ? "pause" : "start") };
  }
  if (key === "o" || key === "O") {
    return { kind: "overlay" };
  }
  return null;
}
