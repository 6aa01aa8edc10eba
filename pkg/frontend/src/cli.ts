#!/usr/bin/env node
import { basename } from "node:path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { plotFer, plotHarq, plotThreshold, PlotSpec } from "./plots.js";
import { SchemaError } from "./schema.js";

type Render = (spec: PlotSpec) => string;

const CHARTS: Record<string, [Render, string]> = {
  fer: [plotFer, "FER curves with confidence bands"],
  threshold: [plotThreshold, "threshold versus code rate"],
  harq: [plotHarq, "retransmission system rate"],
};

interface Args {
  csv: string[];
  out: string;
  label?: string[];
  title?: string;
  xRange?: number[];
  yRange?: number[];
}

function specFrom(argv: Args): PlotSpec {
  const labels = argv.label ?? [];
  return {
    inputs: argv.csv.map((path, i) => ({
      path,
      label: labels[i] ?? basename(path).replace(/\.csv$/, ""),
    })),
    out: argv.out,
    title: argv.title,
    xRange: argv.xRange as [number, number] | undefined,
    yRange: argv.yRange as [number, number] | undefined,
  };
}

export function main(args: string[]): number {
  let parser = yargs(args)
    .scriptName("esrl-plots")
    .strict()
    .exitProcess(false)
    .demandCommand(1);
  for (const [name, [render, describe]] of Object.entries(CHARTS)) {
    parser = parser.command(
      `${name} <csv..>`,
      describe,
      (y) =>
        y
          .positional("csv", { type: "string", array: true, demandOption: true })
          .option("out", { type: "string", demandOption: true })
          .option("label", { type: "string", array: true })
          .option("title", { type: "string" })
          .option("x-range", { type: "number", array: true, nargs: 2 })
          .option("y-range", { type: "number", array: true, nargs: 2 }),
      (argv) => {
        render(specFrom(argv as unknown as Args));
        console.log(`wrote ${(argv as unknown as Args).out}`);
      },
    );
  }
  try {
    parser.parseSync();
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if (err instanceof Error && /Not enough|Unknown|demand/.test(err.message)) {
      console.error(`usage error: ${err.message}`);
      return 2;
    }
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(hideBin(process.argv)));
}
