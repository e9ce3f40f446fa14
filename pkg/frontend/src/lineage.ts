/**
 * Lineage view. Left panel: one timeline row per selected individual,
 * spanning only the necessary generations (earliest ancestor or birth up to
 * the last death among the selection), with cross-row links at the closest
 * common ancestor's generation. Right panel: objective- and decision-space
 * scatters of every lineage node with parent-to-offspring arrows in
 * generation-graded shades (lighter = earlier).
 */

import * as d3 from 'd3';

import type { LineagePayload } from './api';
import { generationShade, originColor } from './colors';

const ROW_H = 26;
const TIMELINE_W = 420;
const PANEL = 220;

export function renderLineage(container: HTMLElement, payload: LineagePayload): void {
  container.innerHTML = '';
  container.classList.add('lineage-view');
  if (payload.ids.length === 0) return;

  // axis span: min(common-ancestor generation, earliest birth/ancestor) to
  // the last death (or the latest generation seen) among selected ids
  let start = Infinity;
  let end = 0;
  for (const tree of payload.trees) {
    for (const node of Object.values(tree.nodes)) {
      start = Math.min(start, node.generation);
      end = Math.max(end, node.death ?? node.generation);
    }
  }
  if (payload.common_ancestors) start = Math.min(start, payload.common_ancestors.generation);
  for (const span of Object.values(payload.life_spans)) {
    end = Math.max(end, span.death ?? span.birth);
  }

  const left = document.createElement('div');
  left.className = 'lineage-timelines';
  container.appendChild(left);

  const svg = d3
    .select(left)
    .append('svg')
    .attr('class', 'timeline-panel')
    .attr('data-axis-start', start)
    .attr('data-axis-end', end)
    .attr('width', TIMELINE_W)
    .attr('height', payload.ids.length * ROW_H + 30);

  const x = d3
    .scaleLinear()
    .domain([start, end])
    .range([70, TIMELINE_W - 12]);

  const axis = svg.append('g').attr('class', 'timeline-axis');
  for (let g = start; g <= end; g += Math.max(1, Math.floor((end - start) / 8))) {
    axis
      .append('text')
      .attr('x', x(g))
      .attr('y', payload.ids.length * ROW_H + 22)
      .attr('class', 'axis-tick')
      .text(String(g));
  }

  payload.ids.forEach((id, row) => {
    const span = payload.life_spans[String(id)];
    const yMid = row * ROW_H + ROW_H / 2;
    const group = svg
      .append('g')
      .attr('class', 'lineage-row')
      .attr('data-id', id);
    group
      .append('text')
      .attr('x', 4)
      .attr('y', yMid + 4)
      .attr('class', 'row-label')
      .text(`#${id}`);
    const deathX = x(span.death ?? end);
    group
      .append('line')
      .attr('class', 'life-line')
      .attr('data-birth', span.birth)
      .attr('data-death', span.death === null ? 'alive' : String(span.death))
      .attr('x1', x(span.birth))
      .attr('x2', deathX)
      .attr('y1', yMid)
      .attr('y2', yMid)
      .attr('stroke-width', 3);
    group
      .append('circle')
      .attr('class', 'birth-mark')
      .attr('cx', x(span.birth))
      .attr('cy', yMid)
      .attr('r', 4);
    if (span.death !== null) {
      group
        .append('path')
        .attr('class', 'death-mark')
        .attr('d', `M${deathX - 4},${yMid - 4}L${deathX + 4},${yMid + 4}M${deathX - 4},${yMid + 4}L${deathX + 4},${yMid - 4}`);
    }
  });

  if (payload.common_ancestors && payload.ids.length >= 2) {
    const gx = x(payload.common_ancestors.generation);
    for (let row = 0; row + 1 < payload.ids.length; row += 1) {
      const y1 = row * ROW_H + ROW_H / 2;
      const y2 = (row + 1) * ROW_H + ROW_H / 2;
      svg
        .append('path')
        .attr('class', 'ancestor-link')
        .attr('data-generation', payload.common_ancestors.generation)
        .attr('data-ancestors', payload.common_ancestors.ids.join(','))
        .attr('fill', 'none')
        .attr('d', `M${gx},${y1}C${gx - 18},${(y1 + y2) / 2},${gx - 18},${(y1 + y2) / 2},${gx},${y2}`);
    }
  }

  const right = document.createElement('div');
  right.className = 'lineage-scatters';
  container.appendChild(right);
  drawAncestryScatter(right, payload, 'objective');
  drawAncestryScatter(right, payload, 'decision');
}

function drawAncestryScatter(
  host: HTMLElement,
  payload: LineagePayload,
  space: 'objective' | 'decision',
): void {
  const svg = d3
    .select(host)
    .append('svg')
    .attr('class', `ancestry-scatter ${space}-ancestry`)
    .attr('width', PANEL)
    .attr('height', PANEL);

  const coords = new Map<number, [number, number]>();
  let minGen = Infinity;
  let maxGen = 0;
  for (const tree of payload.trees) {
    for (const [idText, node] of Object.entries(tree.nodes)) {
      const point: [number, number] =
        space === 'objective' && node.pca
          ? node.pca
          : space === 'objective'
            ? [node.objective[0], node.objective[1] ?? 0]
            : [node.decision[0], node.decision[1] ?? 0];
      coords.set(Number(idText), point);
      minGen = Math.min(minGen, node.generation);
      maxGen = Math.max(maxGen, node.generation);
    }
  }
  const xs = [...coords.values()].map((p) => p[0]);
  const ys = [...coords.values()].map((p) => p[1]);
  const x = d3.scaleLinear().domain(pad(d3.extent(xs) as [number, number])).range([12, PANEL - 12]);
  const y = d3.scaleLinear().domain(pad(d3.extent(ys) as [number, number])).range([PANEL - 12, 12]);

  for (const tree of payload.trees) {
    for (const edge of tree.edges) {
      if (edge.relation === 'reserved_self') continue;
      const from = coords.get(edge.parent);
      const to = coords.get(edge.child);
      if (!from || !to) continue;
      svg
        .append('line')
        .attr('class', 'ancestry-arrow')
        .attr('data-child', edge.child)
        .attr('data-parent', edge.parent)
        .attr('data-generation', edge.generation)
        .attr('x1', x(from[0]))
        .attr('y1', y(from[1]))
        .attr('x2', x(to[0]))
        .attr('y2', y(to[1]))
        .attr('stroke', '#555555')
        .attr('stroke-opacity', generationShade(edge.generation, minGen, maxGen))
        .attr('marker-end', 'url(#arrowhead)');
    }
    for (const [idText, node] of Object.entries(tree.nodes)) {
      const point = coords.get(Number(idText));
      if (!point) continue;
      svg
        .append('circle')
        .attr('class', 'ancestry-node')
        .attr('data-id', idText)
        .attr('cx', x(point[0]))
        .attr('cy', y(point[1]))
        .attr('r', Number(idText) === tree.root ? 5 : 3.5)
        .attr('fill', node.origin === 'initial' ? '#8d99ae' : originColor(node.origin));
    }
  }
}

function pad([lo, hi]: [number, number]): [number, number] {
  const span = hi - lo || 1;
  return [lo - 0.08 * span, hi + 0.08 * span];
}
