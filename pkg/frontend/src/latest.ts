/**
 * Keeps each panel consistent with its *latest* request: a new request
 * aborts the one in flight, and a response is applied only if no newer
 * request was issued meanwhile.
 */
export class LatestGate {
  private seq = 0;
  private controller: AbortController | null = null;

  /** Register a new request; returns its token and abort signal. */
  issue(): { token: number; signal: AbortSignal } {
    this.controller?.abort();
    this.controller = new AbortController();
    return { token: ++this.seq, signal: this.controller.signal };
  }

  /** True iff `token` still belongs to the most recently issued request. */
  isCurrent(token: number): boolean {
    return token === this.seq;
  }
}

/** Trailing-edge debounce; slider drags collapse to one request per pause. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    clearTimeout(timer);
    timer = setTimeout(() => fn(...args), waitMs);
  };
}
