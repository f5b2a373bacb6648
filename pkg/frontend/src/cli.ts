#!/usr/bin/env node
/**
 * qcp-figures — regenerate figures from qcpchain CSV output and
 * validate CSV files against the documented schemas.
 *
 *   qcp-figures render --spec fig.json [--out override.svg]
 *   qcp-figures validate data.csv [--expect sweep] [--json]
 */

import { pathToFileURL } from "node:url";
import yargs from "yargs";
import { CsvError } from "./csv.js";
import { FigureSpecError, loadFigureSpec } from "./figspec.js";
import { FitJsonError } from "./fitjson.js";
import { RenderError, renderToFile } from "./render.js";
import { formatReport, validateCsv } from "./validate.js";
import type { SchemaKind } from "./schemas.js";

const SCHEMA_CHOICES = ["sweep", "spectrum", "corr", "entropy", "gc-table"] as const;

export async function runCli(argv: string[]): Promise<number> {
  let exitCode = 0;
  const parser = yargs(argv)
    .scriptName("qcp-figures")
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      if (err) throw err;
      throw new Error(msg);
    })
    .command(
      "render",
      "render a figure from a FigureSpec JSON document",
      (y) =>
        y
          .option("spec", {
            type: "string",
            demandOption: true,
            describe: "path to the FigureSpec JSON file",
          })
          .option("out", {
            type: "string",
            describe: "override the output path in the spec",
          }),
      (args) => {
        const spec = loadFigureSpec(args.spec);
        const written = renderToFile(spec, args.out);
        process.stdout.write(`wrote ${written}\n`);
      },
    )
    .command(
      "validate <csv>",
      "check a CSV file against the documented schemas",
      (y) =>
        y
          .positional("csv", { type: "string", demandOption: true })
          .option("expect", {
            type: "string",
            choices: SCHEMA_CHOICES,
            describe: "fail unless the file matches this schema",
          })
          .option("json", {
            type: "boolean",
            default: false,
            describe: "print the report as JSON",
          }),
      (args) => {
        const report = validateCsv(
          args.csv as string,
          args.expect as SchemaKind | undefined,
        );
        process.stdout.write(
          (args.json ? JSON.stringify(report, null, 2) : formatReport(report)) +
            "\n",
        );
        if (!report.ok) exitCode = 1;
      },
    )
    .demandCommand(1, "pass a command: render or validate")
    .help();

  try {
    await parser.parseAsync();
  } catch (err) {
    const known =
      err instanceof CsvError ||
      err instanceof FigureSpecError ||
      err instanceof FitJsonError ||
      err instanceof RenderError;
    const msg = err instanceof Error ? err.message : String(err);
    process.stderr.write(`qcp-figures: ${msg}\n`);
    return known ? 1 : 2;
  }
  return exitCode;
}

const invoked = process.argv[1] ? pathToFileURL(process.argv[1]).href : "";
if (import.meta.url === invoked) {
  runCli(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
