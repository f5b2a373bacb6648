export { CsvError, columnNumbers, parseQcpCsv, type ParsedCsv } from "./csv.js";
export {
  CORR_COLUMNS,
  CORR_XI_COLUMNS,
  ENTROPY_COLUMNS,
  GC_TABLE_COLUMNS,
  SPECTRUM_COLUMNS,
  SWEEP_COLUMNS,
  detectSchema,
  schemaColumns,
  type SchemaKind,
} from "./schemas.js";
export {
  formatReport,
  validateCsv,
  validateParsed,
  type CsvReport,
} from "./validate.js";
export {
  FIGURE_KINDS,
  FigureSpecError,
  figureSpecSchema,
  loadFigureSpec,
  resolveGammaC,
  type FigureKind,
  type FigureSpec,
} from "./figspec.js";
export {
  FitJsonError,
  exponentLabel,
  fitResultSchema,
  loadFit,
  type FitResult,
} from "./fitjson.js";
export { renderFigure, renderToFile, RenderError } from "./render.js";
export { runCli } from "./cli.js";
