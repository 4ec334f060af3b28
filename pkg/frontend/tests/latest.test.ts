import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { LatestGate, debounce } from '../src/latest.js';

describe('LatestGate', () => {
  it('marks only the newest token as current', () => {
    const gate = new LatestGate();
    const first = gate.issue();
    const second = gate.issue();
    expect(gate.isCurrent(first.token)).toBe(false);
    expect(gate.isCurrent(second.token)).toBe(true);
  });

  it('aborts the previous request when a new one is issued', () => {
    const gate = new LatestGate();
    const first = gate.issue();
    expect(first.signal.aborted).toBe(false);
    gate.issue();
    expect(first.signal.aborted).toBe(true);
  });

  it('drops a stale response even when it resolves after the newer one', async () => {
    const gate = new LatestGate();
    const applied: string[] = [];

    async function request(name: string, delayMs: number) {
      const { token } = gate.issue();
      await new Promise((resolve) => setTimeout(resolve, delayMs));
      if (gate.isCurrent(token)) applied.push(name);
    }

    const slowStale = request('stale', 30);
    const fastFresh = request('fresh', 5);
    await Promise.all([slowStale, fastFresh]);
    expect(applied).toEqual(['fresh']);
  });
});

describe('debounce', () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it('collapses a burst into one trailing call', () => {
    const calls: number[] = [];
    const fn = debounce((v: number) => calls.push(v), 150);
    fn(1);
    vi.advanceTimersByTime(100);
    fn(2);
    vi.advanceTimersByTime(100);
    fn(3);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(150);
    expect(calls).toEqual([3]);
  });

  it('fires again after a pause', () => {
    const calls: number[] = [];
    const fn = debounce((v: number) => calls.push(v), 150);
    fn(1);
    vi.advanceTimersByTime(150);
    fn(2);
    vi.advanceTimersByTime(150);
    expect(calls).toEqual([1, 2]);
  });
});
