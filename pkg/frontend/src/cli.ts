#!/usr/bin/env node
/** Command line wrapper: read a results CSV, write one SVG figure. */

import { readFileSync, realpathSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import yargs from "yargs";

import { FigureKind, renderFigure } from "./figure.js";

interface CliArgs {
  in: string;
  kind: FigureKind;
  angle: number;
  out: string;
}

function parseArgs(argv: string[]): CliArgs {
  const parser = yargs(argv)
    .scriptName("render_figs")
    .option("in", {
      type: "string",
      demandOption: true,
      describe: "input results CSV",
    })
    .option("kind", {
      choices: ["rmse_sweep", "convergence"] as const,
      demandOption: true,
      describe: "figure kind",
    })
    .option("angle", {
      type: "number",
      default: 1,
      describe: "1-based source index for rmse_sweep",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    });
  const parsed = parser.parseSync();
  return {
    in: parsed.in,
    kind: parsed.kind as FigureKind,
    angle: parsed.angle,
    out: parsed.out,
  };
}

/** Run the CLI against an argv slice; returns the process exit code. */
export function runCli(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
  try {
    const text = readFileSync(args.in, "utf8");
    const svg = renderFigure(text, { kind: args.kind, angle: args.angle });
    writeFileSync(args.out, svg, "utf8");
    process.stderr.write(`wrote ${args.out}\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
}

// bin shims are symlinks, so compare against the resolved script path
const entry = process.argv[1];
const invokedDirectly =
  entry !== undefined && import.meta.url === pathToFileURL(realpathSync(entry)).href;
if (invokedDirectly) {
  process.exit(runCli(process.argv.slice(2)));
}
