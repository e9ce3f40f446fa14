/** Shared test plumbing: real API fixtures and a fetch mock routing to them. */

import { vi } from 'vitest';

import runs from './fixtures/runs.json';
import overview from './fixtures/overview.json';
import generations from './fixtures/generations.json';
import lineage from './fixtures/lineage.json';
import operators from './fixtures/operators.json';
import meta from './fixtures/meta.json';

import type {
  GenerationsPayload,
  LineagePayload,
  OperatorsPayload,
  OverviewPayload,
  RunSummary,
} from '../src/api';

export const fixtures = {
  runs: runs as RunSummary[],
  overview: overview as unknown as OverviewPayload,
  generations: generations as unknown as GenerationsPayload,
  lineage: lineage as unknown as LineagePayload,
  operators: operators as unknown as OperatorsPayload,
  meta: meta as {
    run: string;
    range: { from: number; to: number };
    selected_id: number;
    selected_generation: number;
  },
};

export interface FetchLog {
  calls: string[];
}

/** Install a fetch mock that serves the fixtures; returns the call log. */
export function mockApi(): FetchLog {
  const log: FetchLog = { calls: [] };
  globalThis.fetch = vi.fn(async (input: RequestInfo | URL) => {
    const url = String(input);
    log.calls.push(url);
    const body = routeFixture(url);
    if (body === null) {
      return new Response(JSON.stringify({ detail: `no fixture for ${url}` }), {
        status: 404,
      });
    }
    return new Response(JSON.stringify(body), {
      status: 200,
      headers: { 'content-type': 'application/json' },
    });
  }) as typeof fetch;
  return log;
}

function routeFixture(url: string): unknown {
  if (url.endsWith('/runs')) return fixtures.runs;
  if (url.includes('/overview')) return fixtures.overview;
  if (url.includes('/generations')) return fixtures.generations;
  if (url.includes('/lineage')) return fixtures.lineage;
  if (url.includes('/operators/')) return fixtures.operators;
  return null;
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

export function click(el: Element): void {
  el.dispatchEvent(new MouseEvent('click', { bubbles: true }));
}
