/** Errors carry the core library's stable kind strings across the bridge. */
export class EventlineError extends Error {
  readonly kind: string;

  constructor(kind: string, message: string) {
    super(message);
    this.name = "EventlineError";
    this.kind = kind;
  }
}
