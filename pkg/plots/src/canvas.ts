/** Software RGBA canvas with a plotter-style stroke font; everything deterministic. */

export type Color = [number, number, number];

export const BLACK: Color = [20, 20, 20];
export const GRAY: Color = [150, 150, 150];
export const BLUE: Color = [31, 119, 180];
export const ORANGE: Color = [255, 127, 14];
export const GREEN: Color = [44, 160, 44];
export const RED: Color = [214, 39, 40];

type Stroke = number[][]; // polyline of [x, y] in glyph units (4 wide, 6 tall, y down)

const GLYPHS: Record<string, Stroke[]> = {
  " ": [],
  "0": [[[0, 0], [4, 0], [4, 6], [0, 6], [0, 0]], [[0, 6], [4, 0]]],
  "1": [[[1, 1], [2, 0], [2, 6]], [[1, 6], [3, 6]]],
  "2": [[[0, 1], [1, 0], [3, 0], [4, 1], [4, 2], [0, 6], [4, 6]]],
  "3": [[[0, 0], [4, 0], [2, 2.5], [4, 3.5], [4, 5], [3, 6], [1, 6], [0, 5]]],
  "4": [[[3, 6], [3, 0], [0, 4], [4, 4]]],
  "5": [[[4, 0], [0, 0], [0, 2.5], [3, 2.5], [4, 3.5], [4, 5], [3, 6], [0, 6]]],
  "6": [[[4, 0], [1, 0], [0, 1], [0, 5], [1, 6], [3, 6], [4, 5], [4, 3.5], [3, 2.5], [0, 2.5]]],
  "7": [[[0, 0], [4, 0], [1.5, 6]]],
  "8": [[[0, 0], [4, 0], [4, 6], [0, 6], [0, 0]], [[0, 3], [4, 3]]],
  "9": [[[0, 6], [3, 6], [4, 5], [4, 1], [3, 0], [1, 0], [0, 1], [0, 2.5], [1, 3.5], [4, 3.5]]],
  A: [[[0, 6], [2, 0], [4, 6]], [[1, 3.5], [3, 3.5]]],
  B: [[[0, 3], [0, 0], [3, 0], [4, 1], [4, 2.2], [3, 3], [0, 3], [0, 6], [3, 6], [4, 5], [4, 3.8], [3, 3]]],
  C: [[[4, 1], [3, 0], [1, 0], [0, 1], [0, 5], [1, 6], [3, 6], [4, 5]]],
  D: [[[0, 0], [0, 6], [3, 6], [4, 5], [4, 1], [3, 0], [0, 0]]],
  E: [[[4, 0], [0, 0], [0, 6], [4, 6]], [[0, 3], [3, 3]]],
  F: [[[4, 0], [0, 0], [0, 6]], [[0, 3], [3, 3]]],
  G: [[[4, 1], [3, 0], [1, 0], [0, 1], [0, 5], [1, 6], [3, 6], [4, 5], [4, 3.5], [2.5, 3.5]]],
  H: [[[0, 0], [0, 6]], [[4, 0], [4, 6]], [[0, 3], [4, 3]]],
  I: [[[1, 0], [3, 0]], [[2, 0], [2, 6]], [[1, 6], [3, 6]]],
  J: [[[4, 0], [4, 5], [3, 6], [1, 6], [0, 5]]],
  K: [[[0, 0], [0, 6]], [[4, 0], [0, 3], [4, 6]]],
  L: [[[0, 0], [0, 6], [4, 6]]],
  M: [[[0, 6], [0, 0], [2, 3], [4, 0], [4, 6]]],
  N: [[[0, 6], [0, 0], [4, 6], [4, 0]]],
  O: [[[1, 0], [3, 0], [4, 1], [4, 5], [3, 6], [1, 6], [0, 5], [0, 1], [1, 0]]],
  P: [[[0, 6], [0, 0], [3, 0], [4, 1], [4, 2.5], [3, 3.5], [0, 3.5]]],
  Q: [[[1, 0], [3, 0], [4, 1], [4, 5], [3, 6], [1, 6], [0, 5], [0, 1], [1, 0]], [[2.5, 4.5], [4, 6]]],
  R: [[[0, 6], [0, 0], [3, 0], [4, 1], [4, 2.5], [3, 3.5], [0, 3.5]], [[2, 3.5], [4, 6]]],
  S: [[[4, 1], [3, 0], [1, 0], [0, 1], [0, 2], [1, 3], [3, 3], [4, 4], [4, 5], [3, 6], [1, 6], [0, 5]]],
  T: [[[0, 0], [4, 0]], [[2, 0], [2, 6]]],
  U: [[[0, 0], [0, 5], [1, 6], [3, 6], [4, 5], [4, 0]]],
  V: [[[0, 0], [2, 6], [4, 0]]],
  W: [[[0, 0], [1, 6], [2, 3], [3, 6], [4, 0]]],
  X: [[[0, 0], [4, 6]], [[4, 0], [0, 6]]],
  Y: [[[0, 0], [2, 3], [4, 0]], [[2, 3], [2, 6]]],
  Z: [[[0, 0], [4, 0], [0, 6], [4, 6]]],
  "-": [[[0.5, 3], [3.5, 3]]],
  "+": [[[2, 1], [2, 5]], [[0, 3], [4, 3]]],
  "=": [[[0.5, 2.2], [3.5, 2.2]], [[0.5, 3.8], [3.5, 3.8]]],
  ".": [[[1.8, 5.5], [2.2, 5.5], [2.2, 6], [1.8, 6], [1.8, 5.5]]],
  ",": [[[2.2, 5.2], [1.8, 6.5]]],
  "(": [[[3, 0], [2, 1.5], [2, 4.5], [3, 6]]],
  ")": [[[1, 0], [2, 1.5], [2, 4.5], [1, 6]]],
  "/": [[[0, 6], [4, 0]]],
  ":": [[[2, 1.5], [2, 2]], [[2, 4], [2, 4.5]]],
  "%": [[[0, 6], [4, 0]], [[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], [[3, 5], [4, 5], [4, 6], [3, 6], [3, 5]]],
  "|": [[[2, 0], [2, 6]]],
  "*": [[[2, 1], [2, 5]], [[0.5, 2], [3.5, 4]], [[3.5, 2], [0.5, 4]]],
  "'": [[[2, 0], [2, 1.3]]],
  _: [[[0, 6], [4, 6]]],
  "<": [[[3.5, 1], [0.5, 3], [3.5, 5]]],
  ">": [[[0.5, 1], [3.5, 3], [0.5, 5]]],
};

export class Canvas {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 4).fill(255);
  }

  pixel(x: number, y: number, c: Color): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
    const k = (yi * this.width + xi) * 4;
    this.data[k] = c[0];
    this.data[k + 1] = c[1];
    this.data[k + 2] = c[2];
    this.data[k + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number, c: Color): void {
    const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0), 1) * 2;
    for (let i = 0; i <= steps; i++) {
      const t = i / steps;
      this.pixel(x0 + t * (x1 - x0), y0 + t * (y1 - y0), c);
    }
  }

  polyline(pts: number[][], c: Color): void {
    for (let i = 1; i < pts.length; i++) {
      this.line(pts[i - 1][0], pts[i - 1][1], pts[i][0], pts[i][1], c);
    }
  }

  fillRect(x0: number, y0: number, x1: number, y1: number, c: Color): void {
    const [xa, xb] = [Math.min(x0, x1), Math.max(x0, x1)];
    const [ya, yb] = [Math.min(y0, y1), Math.max(y0, y1)];
    for (let y = Math.max(0, Math.round(ya)); y <= Math.min(this.height - 1, Math.round(yb)); y++) {
      for (let x = Math.max(0, Math.round(xa)); x <= Math.min(this.width - 1, Math.round(xb)); x++) {
        this.pixel(x, y, c);
      }
    }
  }

  rect(x0: number, y0: number, x1: number, y1: number, c: Color): void {
    this.line(x0, y0, x1, y0, c);
    this.line(x1, y0, x1, y1, c);
    this.line(x1, y1, x0, y1, c);
    this.line(x0, y1, x0, y0, c);
  }

  marker(x: number, y: number, c: Color, r = 2): void {
    this.fillRect(x - r, y - r, x + r, y + r, c);
  }

  /** Stroke text; (x, y) is the top-left corner; scale is pixels per glyph unit. */
  text(x: number, y: number, s: string, c: Color, scale = 1.6): void {
    let cx = x;
    for (const ch of s.toUpperCase()) {
      const strokes = GLYPHS[ch] ?? GLYPHS["*"];
      for (const stroke of strokes) {
        this.polyline(
          stroke.map(([gx, gy]) => [cx + gx * scale, y + gy * scale]),
          c,
        );
      }
      cx += 6 * scale;
    }
  }

  textWidth(s: string, scale = 1.6): number {
    return s.length * 6 * scale;
  }
}
