/**
 * Software rasterizer for PNG export. Draws the same geometry as the
 * canvas (and as the server's SVG export) into an RGBA buffer, so the
 * exporter needs no HTML canvas and behaves identically everywhere.
 */
import { encodePng } from "./png.js";
import {
  CanvasScene,
  COMPOSITE_OUTER,
  sceneBounds,
  STATE_RADIUS,
  TRANSITION_H,
  TRANSITION_W,
} from "./scene.js";

export type Rgb = [number, number, number];

const WHITE: Rgb = [255, 255, 255];
const BLACK: Rgb = [0, 0, 0];
const STATE_FILL: Rgb = [152, 251, 152];
const STATE_STROKE: Rgb = [0, 100, 0];

class Raster {
  data: Uint8ClampedArray;

  constructor(readonly width: number, readonly height: number) {
    this.data = new Uint8ClampedArray(width * height * 4);
    this.fillAll(WHITE);
  }

  fillAll(color: Rgb): void {
    for (let i = 0; i < this.data.length; i += 4) {
      this.data[i] = color[0];
      this.data[i + 1] = color[1];
      this.data[i + 2] = color[2];
      this.data[i + 3] = 255;
    }
  }

  set(x: number, y: number, color: Rgb): void {
    const px = Math.round(x);
    const py = Math.round(y);
    if (px < 0 || py < 0 || px >= this.width || py >= this.height) return;
    const at = (py * this.width + px) * 4;
    this.data[at] = color[0];
    this.data[at + 1] = color[1];
    this.data[at + 2] = color[2];
    this.data[at + 3] = 255;
  }

  disc(cx: number, cy: number, r: number, color: Rgb): void {
    for (let y = Math.floor(cy - r); y <= cy + r; y++) {
      for (let x = Math.floor(cx - r); x <= cx + r; x++) {
        if ((x - cx) ** 2 + (y - cy) ** 2 <= r * r) this.set(x, y, color);
      }
    }
  }

  ring(cx: number, cy: number, r: number, color: Rgb, thickness = 1.2): void {
    for (let y = Math.floor(cy - r - 2); y <= cy + r + 2; y++) {
      for (let x = Math.floor(cx - r - 2); x <= cx + r + 2; x++) {
        const d = Math.sqrt((x - cx) ** 2 + (y - cy) ** 2);
        if (Math.abs(d - r) <= thickness / 2 + 0.35) this.set(x, y, color);
      }
    }
  }

  rect(x0: number, y0: number, w: number, h: number, fill: Rgb, stroke: Rgb): void {
    for (let y = Math.round(y0); y < y0 + h; y++) {
      for (let x = Math.round(x0); x < x0 + w; x++) this.set(x, y, fill);
    }
    for (let x = Math.round(x0); x <= x0 + w; x++) {
      this.set(x, y0, stroke);
      this.set(x, y0 + h, stroke);
    }
    for (let y = Math.round(y0); y <= y0 + h; y++) {
      this.set(x0, y, stroke);
      this.set(x0 + w, y, stroke);
    }
  }

  line(x1: number, y1: number, x2: number, y2: number, color: Rgb,
       dash?: [number, number]): void {
    const length = Math.hypot(x2 - x1, y2 - y1);
    const steps = Math.max(1, Math.ceil(length));
    for (let i = 0; i <= steps; i++) {
      const t = i / steps;
      if (dash) {
        const along = t * length;
        if (along % (dash[0] + dash[1]) > dash[0]) continue;
      }
      this.set(x1 + (x2 - x1) * t, y1 + (y2 - y1) * t, color);
    }
  }

  arrowHead(x1: number, y1: number, x2: number, y2: number, color: Rgb,
            size: number): void {
    const angle = Math.atan2(y2 - y1, x2 - x1);
    for (const spread of [-0.45, 0.45]) {
      this.line(x2, y2,
                x2 - size * Math.cos(angle + spread),
                y2 - size * Math.sin(angle + spread), color);
    }
  }
}

export type PngScale = 1 | 2 | 4;

/** Rasterize the scene; pixel dimensions are the integer scene bounds times the scale. */
export function renderScenePng(scene: CanvasScene, scale: PngScale): Uint8Array {
  const bounds = sceneBounds(scene);
  const baseW = Math.ceil(bounds.width);
  const baseH = Math.ceil(bounds.height);
  const raster = new Raster(baseW * scale, baseH * scale);
  const tx = (x: number) => (x - bounds.minX) * scale;
  const ty = (y: number) => (y - bounds.minY) * scale;

  for (const edge of scene.edges) {
    const dash: [number, number] | undefined =
      edge.shape === "dashed-arrow" ? [6 * scale, 4 * scale] : undefined;
    raster.line(tx(edge.x1), ty(edge.y1), tx(edge.x2), ty(edge.y2), BLACK, dash);
    raster.arrowHead(tx(edge.x1), ty(edge.y1), tx(edge.x2), ty(edge.y2),
                     BLACK, 8 * scale);
  }
  for (const node of scene.nodes) {
    const x = tx(node.x);
    const y = ty(node.y);
    if (node.shape === "rectangle") {
      raster.rect(x - (TRANSITION_W / 2) * scale, y - (TRANSITION_H / 2) * scale,
                  TRANSITION_W * scale, TRANSITION_H * scale, WHITE, BLACK);
    } else {
      if (node.shape === "double-circle") {
        raster.ring(x, y, COMPOSITE_OUTER * scale, STATE_STROKE);
      }
      raster.disc(x, y, STATE_RADIUS * scale, STATE_FILL);
      raster.ring(x, y, STATE_RADIUS * scale, STATE_STROKE);
    }
  }
  return encodePng(raster.width, raster.height, raster.data);
}
