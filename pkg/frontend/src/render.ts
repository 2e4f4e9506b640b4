/**
 * Frame planning and canvas drawing, kept apart so the plan is testable:
 * planFrame() is a pure function of the view model, drawPlan() just
 * executes the ops on a 2D context.
 */

import type { ViewModel } from "./state.js";

export const CELL = 24; // fixed cell size in pixels
export const HUD_H = 36;

export type DrawOp =
  | { op: "clear"; fill: string }
  | { op: "rect"; x: number; y: number; w: number; h: number; fill: string }
  | { op: "circle"; x: number; y: number; r: number; fill: string }
  | { op: "text"; x: number; y: number; text: string; fill: string; font: string; align: CanvasTextAlign };

export interface FramePlan {
  width: number;
  height: number;
  ops: DrawOp[];
}

const COLORS = {
  background: "#0b0b12",
  wall: "#23233f",
  lair: "#181830",
  pill: "#e8e3c8",
  powerpill: "#fff2a8",
  pacman: "#ffd23f",
  ghost: "#ef476f",
  ghostEdible: "#4cc9f0",
  ghostLair: "#6c6c85",
  hud: "#cfcfe8",
  banner: "#ffffff",
};

/** Overlay tint: one hue, opacity tracking decay (1 saturated, 0 gone). */
export function overlayTint(decay: number): string {
  const alpha = Math.max(0, Math.min(1, decay)) * 0.65;
  return `rgba(255, 140, 40, ${alpha.toFixed(3)})`;
}

export function overlayGlyphColor(value: string): string {
  return value === "G" ? "#ff8080" : value === "E" ? "#80d8ff" : "#e8e8e8";
}

const cx = (col: number) => col * CELL + CELL / 2;
const cy = (row: number) => HUD_H + row * CELL + CELL / 2;

export function planFrame(vm: ViewModel): FramePlan {
  const ops: DrawOp[] = [{ op: "clear", fill: COLORS.background }];
  if (!vm.maze || !vm.state) {
    const width = 480;
    const height = 200;
    const note =
      vm.connection === "closed" ? "connection closed" :
      vm.error ? `error: ${vm.error}` :
      !vm.maze ? "waiting for server…" : "press space to start";
    ops.push(text(note, width / 2, height / 2, 16, COLORS.banner));
    return { width, height, ops };
  }

  const maze = vm.maze;
  const st = vm.state;
  const width = maze.width * CELL;
  const height = HUD_H + maze.height * CELL;

  for (const [c, r] of maze.walls) {
    ops.push({ op: "rect", x: c * CELL, y: HUD_H + r * CELL, w: CELL, h: CELL,
               fill: COLORS.wall });
  }
  for (const [c, r] of maze.lair) {
    ops.push({ op: "rect", x: c * CELL, y: HUD_H + r * CELL, w: CELL, h: CELL,
               fill: COLORS.lair });
  }

  if (vm.overlayOn && st.overlay) {
    for (const cell of st.overlay.cells) {
      const [c, r, value, decay] = [cell[0], cell[1], cell[2], cell[3]];
      if (value === "e") continue; // keep unclaimed cells dark
      ops.push({ op: "rect", x: c * CELL, y: HUD_H + r * CELL, w: CELL, h: CELL,
                 fill: overlayTint(decay) });
      ops.push(text(value, cx(c), cy(r), 11, overlayGlyphColor(value)));
    }
  }

  for (const [c, r] of st.pills) {
    ops.push({ op: "circle", x: cx(c), y: cy(r), r: 2.5, fill: COLORS.pill });
  }
  for (const [c, r] of st.powerpills) {
    ops.push({ op: "circle", x: cx(c), y: cy(r), r: 6, fill: COLORS.powerpill });
  }
  for (const g of st.ghosts) {
    const fill = g.lair ? COLORS.ghostLair : g.edible ? COLORS.ghostEdible
                                                      : COLORS.ghost;
    ops.push({ op: "circle", x: cx(g.col), y: cy(g.row), r: CELL * 0.38, fill });
  }
  ops.push({ op: "circle", x: cx(st.pacman.col), y: cy(st.pacman.row),
             r: CELL * 0.42, fill: COLORS.pacman });

  const hud = `score ${st.score}   lives ${st.lives}   level ${st.level}` +
              (vm.lastInput ? `   > ${vm.lastInput}` : "") +
              (vm.overlayOn ? "   [overlay]" : "");
  ops.push({ op: "text", x: 10, y: 24, text: hud, fill: COLORS.hud,
             font: "14px monospace", align: "left" });

  if (vm.over) {
    ops.push(text(`game over - score ${vm.over.result.final_score}`,
                  width / 2, height / 2, 22, COLORS.banner));
    ops.push(text("press space for a new game", width / 2, height / 2 + 28,
                  14, COLORS.hud));
  } else if (!vm.running && st.tick === 0) {
    ops.push(text("press space to start", width / 2, height / 2, 18,
                  COLORS.banner));
  }
  return { width, height, ops };
}

function text(t: string, x: number, y: number, size: number, fill: string): DrawOp {
  return { op: "text", x, y, text: t, fill, font: `${size}px monospace`,
           align: "center" };
}

export function drawPlan(ctx: CanvasRenderingContext2D, plan: FramePlan): void {
  for (const op of plan.ops) {
    switch (op.op) {
      case "clear":
        ctx.fillStyle = op.fill;
        ctx.fillRect(0, 0, plan.width, plan.height);
        break;
      case "rect":
        ctx.fillStyle = op.fill;
        ctx.fillRect(op.x, op.y, op.w, op.h);
        break;
      case "circle":
        ctx.fillStyle = op.fill;
        ctx.beginPath();
        ctx.arc(op.x, op.y, op.r, 0, Math.PI * 2);
        ctx.fill();
        break;
      case "text":
        ctx.fillStyle = op.fill;
        ctx.font = op.font;
        ctx.textAlign = op.align;
        ctx.textBaseline = "middle";
        ctx.fillText(op.text, op.x, op.y);
        break;
    }
  }
}
