import { beforeEach, describe, expect, it } from 'vitest';

import { renderOverview } from '../src/overview';
import { Store } from '../src/state';
import { ORIGIN_COLORS, ORIGIN_ORDER } from '../src/colors';
import { click, fixtures } from './helpers';

describe('overview', () => {
  let host: HTMLElement;
  let store: Store;

  beforeEach(() => {
    document.body.innerHTML = '<div id="host"></div>';
    host = document.getElementById('host')!;
    store = new Store();
    renderOverview(host, fixtures.overview, store);
  });

  it('renders the four aligned quality charts', () => {
    const charts = [...host.querySelectorAll('svg.quality-chart')];
    expect(charts.map((c) => c.getAttribute('data-measure'))).toEqual([
      'igd',
      'hv',
      'sp',
      'ms',
    ]);
    for (const chart of charts) {
      expect(chart.querySelector('path.measure-line')).not.toBeNull();
      expect(chart.querySelectorAll('circle.measure-point').length).toBe(
        fixtures.overview.generations,
      );
    }
  });

  it('keeps all four chart domains identical under zoom', () => {
    const chart = host.querySelector('svg.quality-chart')!;
    chart.dispatchEvent(new WheelEvent('wheel', { deltaY: -120, bubbles: true }));
    const domains = [...host.querySelectorAll('svg.quality-chart')].map((c) => [
      c.getAttribute('data-x0'),
      c.getAttribute('data-x1'),
    ]);
    for (const domain of domains) {
      expect(domain).toEqual(domains[0]);
    }
  });

  it('clicking a chart point selects a six-generation range', () => {
    const point = host.querySelector('circle.measure-point[data-generation="4"]')!;
    click(point);
    const range = store.get().range!;
    expect(range.to - range.from + 1).toBe(6);
    expect(range.from).toBeGreaterThanOrEqual(1);
    expect(range.to).toBeLessThanOrEqual(fixtures.overview.generations);
    expect(range.from <= 4 && 4 <= range.to).toBe(true);
  });

  it('draws stacked origin bars with striped non-survivor segments', () => {
    const bars = [...host.querySelectorAll('g.origin-bar')];
    expect(bars.length).toBe(fixtures.overview.origin_statistics.length);

    const survivedSegments = host.querySelectorAll(
      'rect.origin-segment[data-survived="true"]',
    );
    for (const segment of survivedSegments) {
      const origin = segment.getAttribute('data-origin')!;
      expect(segment.getAttribute('fill')).toBe(
        ORIGIN_COLORS[origin as keyof typeof ORIGIN_COLORS],
      );
    }
    const deadSegments = [
      ...host.querySelectorAll('rect.origin-segment[data-survived="false"]'),
    ];
    expect(deadSegments.length).toBeGreaterThan(0);
    for (const segment of deadSegments) {
      expect(segment.classList.contains('striped')).toBe(true);
      expect(segment.getAttribute('fill')).toBe(
        `url(#stripe-${segment.getAttribute('data-origin')})`,
      );
    }
  });

  it('per-generation survived segment counts sum to mu', () => {
    for (const entry of fixtures.overview.origin_statistics) {
      const total = ORIGIN_ORDER.reduce((sum, origin) => sum + entry[origin].survived, 0);
      expect(total).toBe(fixtures.overview.mu);
    }
  });

  it('clicking a stacked bar selects a range containing its generation', () => {
    const bar = host.querySelector('g.origin-bar[data-generation="5"]')!;
    click(bar);
    const range = store.get().range!;
    expect(range.from <= 5 && 5 <= range.to).toBe(true);
  });
});
