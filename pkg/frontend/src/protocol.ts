/**
 * Wire schema for the session server's JSON frames.
 *
 * Versioned with "v"; every inbound frame is validated before it reaches
 * the view model so a malformed server can never wedge the renderer.
 */

export const PROTOCOL_VERSION = 1;

export type Dir = "Up" | "Down" | "Left" | "Right";

export interface MazeFrame {
  v: number;
  type: "maze";
  name: string;
  width: number;
  height: number;
  walls: [number, number][];
  lair: [number, number][];
  tunnel_rows: number[];
}

export interface GhostView {
  id: number;
  col: number;
  row: number;
  edible: boolean;
  lair: boolean;
}

export interface OverlayCell {
  0: number; // col
  1: number; // row
  2: string; // value character
  3: number; // decay
}

export interface StateFrame {
  v: number;
  type: "state";
  tick: number;
  score: number;
  lives: number;
  level: number;
  pacman: { col: number; row: number; facing: string };
  ghosts: GhostView[];
  pills: [number, number][];
  powerpills: [number, number][];
  over: boolean;
  overlay?: { cells: OverlayCell[] };
}

export interface OverFrame {
  v: number;
  type: "over";
  result: {
    final_score: number;
    levels_cleared: number;
    ticks_survived: number;
    seed: number;
  };
}

export interface ErrorFrame {
  v: number;
  type: "error";
  reason: string;
}

export type ServerFrame = MazeFrame | StateFrame | OverFrame | ErrorFrame;

export interface InputMessage {
  v: number;
  type: "input";
  dir: Dir;
}

export interface ControlMessage {
  v: number;
  type: "control";
  verb: "start" | "pause" | "restart";
}

export function inputMessage(dir: Dir): InputMessage {
  return { v: PROTOCOL_VERSION, type: "input", dir };
}

export function controlMessage(verb: ControlMessage["verb"]): ControlMessage {
  return { v: PROTOCOL_VERSION, type: "control", verb };
}

/** Parse one server frame; null for anything that is not a known frame. */
export function parseFrame(raw: string): ServerFrame | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const frame = data as Record<string, unknown>;
  if (frame.v !== PROTOCOL_VERSION) return null;
  switch (frame.type) {
    case "maze":
      return isMaze(frame) ? (frame as unknown as MazeFrame) : null;
    case "state":
      return isState(frame) ? (frame as unknown as StateFrame) : null;
    case "over":
      return typeof frame.result === "object" && frame.result !== null
        ? (frame as unknown as OverFrame)
        : null;
    case "error":
      return typeof frame.reason === "string"
        ? (frame as unknown as ErrorFrame)
        : null;
    default:
      return null;
  }
}

function isMaze(f: Record<string, unknown>): boolean {
  return (
    typeof f.width === "number" &&
    typeof f.height === "number" &&
    Array.isArray(f.walls)
  );
}

function isState(f: Record<string, unknown>): boolean {
  return (
    typeof f.tick === "number" &&
    typeof f.score === "number" &&
    typeof f.pacman === "object" &&
    f.pacman !== null &&
    Array.isArray(f.ghosts) &&
    Array.isArray(f.pills)
  );
}
