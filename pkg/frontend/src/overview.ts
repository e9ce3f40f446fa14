/**
 * Performance overview: four aligned quality line charts (IGD, HV, SP, MS)
 * with a synchronized semantic zoom on the shared generation axis, and the
 * per-generation origin stacked bars (striped segments mark candidates that
 * did not survive selection). Brushing or clicking selects the generation
 * range shown in the workspace.
 */

import * as d3 from 'd3';

import type { OverviewPayload } from './api';
import { ORIGIN_COLORS, ORIGIN_ORDER } from './colors';
import type { Store } from './state';

const MEASURES = ['igd', 'hv', 'sp', 'ms'] as const;
const WIDTH = 420;
const HEIGHT = 80;
const MARGIN = { left: 42, right: 8, top: 6, bottom: 16 };
const CLICK_RANGE = 6; // columns selected when clicking a chart dot

export function renderOverview(
  container: HTMLElement,
  payload: OverviewPayload,
  store: Store,
): void {
  container.innerHTML = '';
  container.classList.add('overview');

  const generations = payload.quality_series.generation;
  const total = payload.generations;
  // shared zoom window over the generation axis
  let domain: [number, number] = [generations[0], generations[generations.length - 1]];

  const chartsHost = document.createElement('div');
  chartsHost.className = 'quality-charts';
  container.appendChild(chartsHost);

  function drawCharts(): void {
    chartsHost.innerHTML = '';
    for (const measure of MEASURES) {
      const values = payload.quality_series[measure];
      const svg = d3
        .select(chartsHost)
        .append('svg')
        .attr('class', 'quality-chart')
        .attr('data-measure', measure)
        .attr('data-x0', String(domain[0]))
        .attr('data-x1', String(domain[1]))
        .attr('width', WIDTH)
        .attr('height', HEIGHT + MARGIN.top + MARGIN.bottom);

      const x = d3
        .scaleLinear()
        .domain(domain)
        .range([MARGIN.left, WIDTH - MARGIN.right]);
      const visible = values.filter(
        (_, i) => generations[i] >= domain[0] && generations[i] <= domain[1],
      );
      const y = d3
        .scaleLinear()
        .domain([Math.min(0, d3.min(visible) ?? 0), d3.max(visible) ?? 1])
        .nice()
        .range([HEIGHT + MARGIN.top, MARGIN.top]);

      svg
        .append('text')
        .attr('class', 'measure-label')
        .attr('x', 4)
        .attr('y', 12)
        .text(measure.toUpperCase());

      const line = d3
        .line<number>()
        .x((_, i) => x(generations[i]))
        .y((v) => y(v));
      svg
        .append('path')
        .attr('class', 'measure-line')
        .attr('fill', 'none')
        .attr('stroke', '#31572c')
        .attr('d', line(values) ?? '');

      svg
        .selectAll('circle.measure-point')
        .data(values.map((value, i) => ({ value, generation: generations[i] })))
        .enter()
        .append('circle')
        .attr('class', 'measure-point')
        .attr('data-generation', (d) => d.generation)
        .attr('cx', (d) => x(d.generation))
        .attr('cy', (d) => y(d.value))
        .attr('r', 2.5)
        .on('click', (_event, d) => clickSelect(d.generation));

      // synchronized semantic zoom: wheel over any chart rescales all four
      svg.on('wheel', (event: WheelEvent) => {
        event.preventDefault();
        const factor = event.deltaY < 0 ? 0.8 : 1.25;
        const center = x.invert(event.offsetX || (MARGIN.left + WIDTH) / 2);
        const width = (domain[1] - domain[0]) * factor;
        const lo = Math.max(generations[0], center - width / 2);
        const hi = Math.min(generations[generations.length - 1], lo + width);
        domain = [Math.floor(lo), Math.ceil(hi)];
        drawCharts();
      });

      // drag to brush a generation range
      let anchor: number | null = null;
      svg.on('mousedown', (event: MouseEvent) => {
        anchor = Math.round(x.invert(event.offsetX));
      });
      svg.on('mouseup', (event: MouseEvent) => {
        if (anchor === null) return;
        const end = Math.round(x.invert(event.offsetX));
        if (end !== anchor) {
          store.selectRange(
            Math.max(1, Math.min(anchor, end)),
            Math.min(total, Math.max(anchor, end)),
          );
        }
        anchor = null;
      });
    }
  }

  function clickSelect(generation: number): void {
    let from = generation - Math.floor(CLICK_RANGE / 2);
    let to = from + CLICK_RANGE - 1;
    if (from < 1) {
      from = 1;
      to = Math.min(total, CLICK_RANGE);
    }
    if (to > total) {
      to = total;
      from = Math.max(1, total - CLICK_RANGE + 1);
    }
    store.selectRange(from, to);
  }

  drawCharts();

  // --- origin stacked bars -------------------------------------------------

  const barsHost = d3
    .select(container)
    .append('svg')
    .attr('class', 'origin-bars')
    .attr('width', WIDTH)
    .attr('height', payload.origin_statistics.length * 14 + 8);

  const defs = barsHost.append('defs');
  for (const origin of ORIGIN_ORDER) {
    const pattern = defs
      .append('pattern')
      .attr('id', `stripe-${origin}`)
      .attr('width', 5)
      .attr('height', 5)
      .attr('patternUnits', 'userSpaceOnUse')
      .attr('patternTransform', 'rotate(45)');
    pattern
      .append('rect')
      .attr('width', 5)
      .attr('height', 5)
      .attr('fill', ORIGIN_COLORS[origin]);
    pattern
      .append('line')
      .attr('x1', 0)
      .attr('y1', 0)
      .attr('x2', 0)
      .attr('y2', 5)
      .attr('stroke', '#ffffff')
      .attr('stroke-width', 2.5);
  }

  const poolSizes = payload.origin_statistics.map((entry) =>
    ORIGIN_ORDER.reduce((sum, o) => sum + entry[o].survived + entry[o].died, 0),
  );
  const widthScale = d3
    .scaleLinear()
    .domain([0, d3.max(poolSizes) ?? 1])
    .range([0, WIDTH - 70]);

  payload.origin_statistics.forEach((entry, row) => {
    const group = barsHost
      .append('g')
      .attr('class', 'origin-bar')
      .attr('data-generation', entry.generation)
      .attr('transform', `translate(0, ${row * 14 + 4})`);
    group
      .append('text')
      .attr('class', 'bar-label')
      .attr('x', 2)
      .attr('y', 10)
      .text(String(entry.generation));
    group.on('click', () => clickSelect(entry.generation));

    let offset = 36;
    for (const origin of ORIGIN_ORDER) {
      for (const survived of [true, false]) {
        const count = survived ? entry[origin].survived : entry[origin].died;
        if (count === 0) continue;
        const segment = widthScale(count);
        group
          .append('rect')
          .attr('class', `origin-segment${survived ? '' : ' striped'}`)
          .attr('data-origin', origin)
          .attr('data-survived', String(survived))
          .attr('data-count', count)
          .attr('x', offset)
          .attr('y', 1)
          .attr('width', segment)
          .attr('height', 11)
          .attr('fill', survived ? ORIGIN_COLORS[origin] : `url(#stripe-${origin})`);
        offset += segment;
      }
    }
  });
}
