#!/usr/bin/env node
/** CLI: plot <figure-kind> --in <artifact-dir> --out <file.png> [--linear-y] */

import { writeFileSync } from "node:fs";

import { FIGURE_KINDS, FigureSpec, render } from "./figures.js";
import { encodePng } from "./png.js";

function usage(): never {
  console.error(
    `usage: plot <${FIGURE_KINDS.join("|")}> --in <artifact-dir> --out <file.png> [--linear-y]`,
  );
  process.exit(2);
}

export function main(argv: string[]): number {
  if (argv.length === 0) usage();
  const kind = argv[0];
  let inputDir: string | undefined;
  let outFile: string | undefined;
  let logY: boolean | undefined;
  for (let i = 1; i < argv.length; i++) {
    switch (argv[i]) {
      case "--in":
        inputDir = argv[++i];
        break;
      case "--out":
        outFile = argv[++i];
        break;
      case "--linear-y":
        logY = false;
        break;
      default:
        console.error(`unknown argument ${argv[i]}`);
        return 2;
    }
  }
  if (!inputDir || !outFile) usage();
  const spec: FigureSpec = { kind, inputDir, outFile, logY };
  try {
    const canvas = render(spec);
    writeFileSync(outFile, encodePng(canvas.width, canvas.height, canvas.data));
  } catch (err) {
    console.error(`plot ${kind}: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  console.log(`wrote ${outFile}`);
  return 0;
}

const isDirect = process.argv[1] && import.meta.url.endsWith(
  process.argv[1].split("/").pop() ?? "",
);
if (isDirect) {
  process.exit(main(process.argv.slice(2)));
}
