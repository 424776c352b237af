export { column, parseTable, seriesColumns } from "./csv.js";
export type { Table } from "./csv.js";
export { EmptyTableError, MissingColumnError } from "./errors.js";
export { renderFigure } from "./figure.js";
export type { FigureKind, FigureSpec } from "./figure.js";
export { runCli } from "./cli.js";
