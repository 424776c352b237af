/** Error types surfaced to CLI users with actionable messages. */

export class MissingColumnError extends Error {
  readonly column: string;
  readonly available: string[];

  constructor(column: string, available: string[]) {
    super(
      `column "${column}" not found; available columns: ${available.join(", ")}`,
    );
    this.name = "MissingColumnError";
    this.column = column;
    this.available = available;
  }
}

export class EmptyTableError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EmptyTableError";
  }
}
