/** Malformed wire data: bad motion/codes text, bad codebook table. */
export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

/** Non-2xx service response, with the parsed error body attached. */
export class ApiError extends Error {
  readonly status: number;
  /** editing stage that failed ("frame_range", "code_edit:3", ...), when the service names one */
  readonly stage: string | null;

  constructor(message: string, status: number, stage: string | null = null) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.stage = stage;
  }
}
