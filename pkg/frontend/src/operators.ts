/**
 * Evolutionary-operator view: three panels for one generation step.
 *
 * Mating/crossover panel: one glyph row per pair (green parent dots joined
 * by a line whose length encodes their decision-space distance, small purple
 * offspring dots with perturbation halos, dashed quality circles with radius
 * proportional to the nearest-reference distance) plus the row list is
 * sortable by parent-parent or parent-offspring distance. Mutation panel:
 * pre/post glyphs (purple/yellow) with per-dimension min-max-normalized
 * direction-vector bars, sortable by mutation distance or any dimension.
 * Selection panel: priority-ordered groups of member chips (origin-colored,
 * fitness-scored, top performer flagged), per-group origin stacks and
 * total/survived headers. Clicking anything highlights that individual in
 * every panel and draws linking lines; a group toggle highlights the whole
 * group.
 */

import * as d3 from 'd3';

import type { OperatorsPayload, OperatorPair, OperatorMutation } from './api';
import { decodeScore } from './api';
import { ORIGIN_ORDER, originColor } from './colors';
import type { Store } from './state';

const GLYPH_W = 230;
const GLYPH_H = 44;

export type PairSort = 'parent_parent' | 'parent_offspring' | null;
export type MutationSort = 'distance' | `dim:${number}` | null;

export function renderOperatorView(
  container: HTMLElement,
  payload: OperatorsPayload,
  store: Store,
  pairSort: PairSort = null,
  mutationSort: MutationSort = null,
): void {
  container.innerHTML = '';
  container.classList.add('operator-view');
  container.dataset.generation = String(payload.generation);

  const heading = document.createElement('h3');
  heading.textContent = `operators producing generation ${payload.generation}`;
  container.appendChild(heading);

  renderMatingPanel(container, payload, store, pairSort, mutationSort);
  renderMutationPanel(container, payload, store, pairSort, mutationSort);
  renderSelectionPanel(container, payload, store);
  applyHighlight(container, store.get().highlightedId, payload);
}

function sortControl<T extends string>(
  host: HTMLElement,
  name: string,
  options: Array<{ value: T; label: string }>,
  current: T | null,
  onChange: (value: T | null) => void,
): void {
  const select = document.createElement('select');
  select.className = `sort-${name}`;
  const none = document.createElement('option');
  none.value = '';
  none.textContent = 'unsorted';
  select.appendChild(none);
  for (const option of options) {
    const el = document.createElement('option');
    el.value = option.value;
    el.textContent = option.label;
    if (option.value === current) el.selected = true;
    select.appendChild(el);
  }
  select.addEventListener('change', () => {
    onChange((select.value || null) as T | null);
  });
  host.appendChild(select);
}

function renderMatingPanel(
  container: HTMLElement,
  payload: OperatorsPayload,
  store: Store,
  pairSort: PairSort,
  mutationSort: MutationSort,
): void {
  const panel = document.createElement('section');
  panel.className = 'operator-panel';
  panel.dataset.panel = 'mating';
  container.appendChild(panel);
  const header = document.createElement('header');
  header.textContent = 'mating & crossover';
  panel.appendChild(header);
  sortControl(
    header,
    'pairs',
    [
      { value: 'parent_parent', label: 'parent-parent distance' },
      { value: 'parent_offspring', label: 'parent-offspring distance' },
    ],
    pairSort,
    (value) => renderOperatorView(container, payload, store, value, mutationSort),
  );

  const pairs = [...payload.pairs];
  if (pairSort === 'parent_parent') {
    pairs.sort((a, b) => a.parent_parent_distance - b.parent_parent_distance);
  } else if (pairSort === 'parent_offspring') {
    pairs.sort((a, b) => maxOffspringDistance(a) - maxOffspringDistance(b));
  }

  const maxParentDistance = Math.max(...payload.pairs.map((p) => p.parent_parent_distance), 1e-12);
  const maxReference = Math.max(
    ...payload.pairs.flatMap((p) => Object.values(p.nearest_reference)),
    1e-12,
  );
  const maxPerturbation = Math.max(
    ...payload.pairs.flatMap((p) => p.perturbation_magnitudes),
    0,
  );

  for (const pair of pairs) {
    const row = document.createElement('div');
    row.className = 'pair-row';
    row.dataset.parents = `${pair.parent_a},${pair.parent_b}`;
    row.dataset.offspring = pair.offspring.join(',');
    row.dataset.parentParentDistance = String(pair.parent_parent_distance);
    panel.appendChild(row);

    const svg = d3
      .select(row)
      .append('svg')
      .attr('class', 'pair-glyph')
      .attr('width', GLYPH_W)
      .attr('height', GLYPH_H);
    const mid = GLYPH_H / 2;
    const lineLength = 30 + 120 * (pair.parent_parent_distance / maxParentDistance);
    const x0 = 30;

    svg
      .append('line')
      .attr('class', 'parent-line')
      .attr('x1', x0)
      .attr('x2', x0 + lineLength)
      .attr('y1', mid)
      .attr('y2', mid)
      .attr('stroke', '#888888');

    const actors: Array<{ id: number; x: number; kind: 'parent' | 'offspring'; halo: number }> = [
      { id: pair.parent_a, x: x0, kind: 'parent', halo: 0 },
      { id: pair.parent_b, x: x0 + lineLength, kind: 'parent', halo: 0 },
      {
        id: pair.offspring[0],
        x: x0 + lineLength / 3,
        kind: 'offspring',
        halo: pair.perturbation_magnitudes[0],
      },
      {
        id: pair.offspring[1],
        x: x0 + (2 * lineLength) / 3,
        kind: 'offspring',
        halo: pair.perturbation_magnitudes[1],
      },
    ];
    for (const actor of actors) {
      // dashed quality circle: radius encodes nearest-reference distance
      svg
        .append('circle')
        .attr('class', 'quality-circle')
        .attr('data-id', actor.id)
        .attr('cx', actor.x)
        .attr('cy', mid)
        .attr(
          'r',
          4 + 12 * ((pair.nearest_reference[String(actor.id)] ?? 0) / maxReference),
        )
        .attr('fill', 'none')
        .attr('stroke', '#aaaaaa')
        .attr('stroke-dasharray', '3,2');
      if (actor.kind === 'offspring' && actor.halo > 0 && maxPerturbation > 0) {
        svg
          .append('circle')
          .attr('class', 'perturbation-halo')
          .attr('data-id', actor.id)
          .attr('cx', actor.x)
          .attr('cy', mid)
          .attr('r', 4 + 8 * (actor.halo / maxPerturbation))
          .attr('fill', originColor('crossover_offspring'))
          .attr('fill-opacity', 0.25);
      }
      svg
        .append('circle')
        .attr('class', `glyph-dot ${actor.kind}`)
        .attr('data-id', actor.id)
        .attr('cx', actor.x)
        .attr('cy', mid)
        .attr('r', actor.kind === 'parent' ? 5 : 2.6)
        .attr(
          'fill',
          actor.kind === 'parent'
            ? originColor('mating_pool')
            : originColor('crossover_offspring'),
        )
        .on('click', () => store.update({ highlightedId: actor.id }));
    }

    const label = document.createElement('span');
    label.className = 'pair-label';
    label.textContent =
      `#${pair.parent_a} x #${pair.parent_b} -> ` +
      pair.offspring.map((o) => `#${o}`).join(', ') +
      ` (beta ${pair.beta.toFixed(3)})`;
    row.appendChild(label);
  }
}

function maxOffspringDistance(pair: OperatorPair): number {
  return Math.max(...pair.offspring_parent_distances.flat());
}

function renderMutationPanel(
  container: HTMLElement,
  payload: OperatorsPayload,
  store: Store,
  pairSort: PairSort,
  mutationSort: MutationSort,
): void {
  const panel = document.createElement('section');
  panel.className = 'operator-panel';
  panel.dataset.panel = 'mutation';
  container.appendChild(panel);
  const header = document.createElement('header');
  header.textContent = 'mutation';
  panel.appendChild(header);
  const dims = payload.n;
  sortControl(
    header,
    'mutations',
    [
      { value: 'distance', label: 'mutation distance' },
      ...Array.from({ length: dims }, (_, d) => ({
        value: `dim:${d}` as const,
        label: `delta dim ${d}`,
      })),
    ],
    mutationSort,
    (value) => renderOperatorView(container, payload, store, pairSort, value),
  );

  const mutations = [...payload.mutations];
  if (mutationSort === 'distance') {
    mutations.sort((a, b) => a.distance - b.distance);
  } else if (mutationSort?.startsWith('dim:')) {
    const dim = Number(mutationSort.slice(4));
    mutations.sort((a, b) => a.delta[dim] - b.delta[dim]);
  }

  const maxDistance = Math.max(...payload.mutations.map((m) => m.distance), 1e-12);
  const maxReference = Math.max(
    ...payload.mutations.flatMap((m) => [m.pre_nearest_reference, m.post_nearest_reference]),
    1e-12,
  );

  for (const mutation of mutations) {
    const row = document.createElement('div');
    row.className = 'mutation-row';
    row.dataset.offspring = String(mutation.offspring);
    row.dataset.mutant = String(mutation.mutant);
    row.dataset.distance = String(mutation.distance);
    panel.appendChild(row);
    drawMutationGlyph(row, mutation, maxDistance, maxReference, store);
    drawDeltaBars(row, mutation);
  }
}

function drawMutationGlyph(
  row: HTMLElement,
  mutation: OperatorMutation,
  maxDistance: number,
  maxReference: number,
  store: Store,
): void {
  const svg = d3
    .select(row)
    .append('svg')
    .attr('class', 'mutation-glyph')
    .attr('width', GLYPH_W)
    .attr('height', GLYPH_H);
  const mid = GLYPH_H / 2;
  const x0 = 30;
  const length = 30 + 120 * (mutation.distance / maxDistance);

  svg
    .append('line')
    .attr('class', 'mutation-line')
    .attr('x1', x0)
    .attr('x2', x0 + length)
    .attr('y1', mid)
    .attr('y2', mid)
    .attr('stroke', '#888888');

  const ends = [
    { id: mutation.offspring, x: x0, origin: 'crossover_offspring', ref: mutation.pre_nearest_reference },
    { id: mutation.mutant, x: x0 + length, origin: 'mutated_offspring', ref: mutation.post_nearest_reference },
  ] as const;
  for (const end of ends) {
    svg
      .append('circle')
      .attr('class', 'quality-circle')
      .attr('data-id', end.id)
      .attr('cx', end.x)
      .attr('cy', mid)
      .attr('r', 4 + 12 * (end.ref / maxReference))
      .attr('fill', 'none')
      .attr('stroke', '#aaaaaa')
      .attr('stroke-dasharray', '3,2');
    svg
      .append('circle')
      .attr('class', 'glyph-dot')
      .attr('data-id', end.id)
      .attr('cx', end.x)
      .attr('cy', mid)
      .attr('r', 4)
      .attr('fill', originColor(end.origin))
      .on('click', () => store.update({ highlightedId: end.id }));
  }
}

function drawDeltaBars(row: HTMLElement, mutation: OperatorMutation): void {
  const dims = mutation.delta_normalized.length;
  const barWidth = 9;
  const svg = d3
    .select(row)
    .append('svg')
    .attr('class', 'delta-bars')
    .attr('width', dims * (barWidth + 2) + 4)
    .attr('height', GLYPH_H);
  mutation.delta_normalized.forEach((value, dim) => {
    const height = 4 + value * (GLYPH_H - 10);
    svg
      .append('rect')
      .attr('class', 'delta-bar')
      .attr('data-dim', dim)
      .attr('data-normalized', String(value))
      .attr('data-raw', String(mutation.delta[dim]))
      .attr('x', 2 + dim * (barWidth + 2))
      .attr('y', GLYPH_H - 3 - height)
      .attr('width', barWidth)
      .attr('height', height)
      .attr('fill', originColor('mutated_offspring'));
  });
}

function renderSelectionPanel(
  container: HTMLElement,
  payload: OperatorsPayload,
  store: Store,
): void {
  const panel = document.createElement('section');
  panel.className = 'operator-panel';
  panel.dataset.panel = 'selection';
  container.appendChild(panel);
  const header = document.createElement('header');
  header.textContent = `environmental selection (${payload.selection.prioritized ? 'prioritized groups' : 'equal-priority groups'})`;
  panel.appendChild(header);

  const largest = Math.max(...payload.selection.groups.map((g) => g.total), 1);

  for (const group of payload.selection.groups) {
    const groupHost = document.createElement('div');
    groupHost.className = 'selection-group';
    groupHost.dataset.rank = String(group.rank);
    groupHost.dataset.total = String(group.total);
    groupHost.dataset.survived = String(group.survived);
    panel.appendChild(groupHost);

    const groupHeader = document.createElement('div');
    groupHeader.className = 'group-header';
    groupHost.appendChild(groupHeader);

    const toggle = document.createElement('input');
    toggle.type = 'checkbox';
    toggle.className = 'group-toggle';
    toggle.addEventListener('change', () => {
      groupHost
        .querySelectorAll('.member-chip')
        .forEach((chip) => chip.classList.toggle('highlighted', toggle.checked));
    });
    groupHeader.appendChild(toggle);

    const title = document.createElement('span');
    title.className = 'group-title';
    title.textContent = `group ${group.rank} — ${group.total} total / ${group.survived} survived`;
    groupHeader.appendChild(title);

    // per-group origin proportions, bar length normalized by group size
    const stack = d3
      .select(groupHeader)
      .append('svg')
      .attr('class', 'group-origin-stack')
      .attr('width', 140)
      .attr('height', 10);
    let offset = 0;
    for (const origin of ORIGIN_ORDER) {
      const count = group.origin_counts[origin];
      if (!count) continue;
      const width = (140 * count) / largest;
      stack
        .append('rect')
        .attr('class', 'group-origin-segment')
        .attr('data-origin', origin)
        .attr('data-count', count)
        .attr('x', offset)
        .attr('width', width)
        .attr('height', 10)
        .attr('fill', originColor(origin));
      offset += width;
    }

    const best = group.members.reduce(
      (top, member) =>
        decodeScore(member.fitness) > decodeScore(top.fitness) ? member : top,
      group.members[0],
    );
    const chips = document.createElement('div');
    chips.className = 'group-members';
    groupHost.appendChild(chips);
    for (const member of group.members) {
      const chip = document.createElement('span');
      chip.className =
        'member-chip' +
        (member.survived ? ' survived' : ' died') +
        (member === best ? ' top-performer' : '');
      chip.dataset.id = String(member.id);
      chip.dataset.origin = member.origin;
      chip.dataset.fitness = String(member.fitness);
      chip.style.backgroundColor = originColor(member.origin);
      const score = decodeScore(member.fitness);
      chip.textContent = `#${member.id} ${Number.isFinite(score) ? score.toPrecision(3) : '∞'}`;
      chip.addEventListener('click', () => store.update({ highlightedId: member.id }));
      chips.appendChild(chip);
    }
  }
}

/**
 * Linked highlighting: mark every element tied to the highlighted id and
 * draw linking lines inside glyph rows that involve it (parents <-> offspring
 * in the mating panel, pre-image <-> mutant in the mutation panel).
 */
export function applyHighlight(
  container: HTMLElement,
  id: number | null,
  payload: OperatorsPayload,
): void {
  container.querySelectorAll('.highlighted-link').forEach((el) => el.remove());
  container.querySelectorAll('[data-id]').forEach((el) => {
    el.classList.toggle('highlighted', id !== null && el.getAttribute('data-id') === String(id));
  });
  if (id === null) return;

  for (const row of container.querySelectorAll<HTMLElement>('.pair-row')) {
    const members = [
      ...(row.dataset.parents ?? '').split(','),
      ...(row.dataset.offspring ?? '').split(','),
    ];
    if (members.includes(String(id))) {
      row.classList.add('highlighted');
      linkDots(row, payload);
    }
  }
  for (const row of container.querySelectorAll<HTMLElement>('.mutation-row')) {
    if (row.dataset.offspring === String(id) || row.dataset.mutant === String(id)) {
      row.classList.add('highlighted');
      linkDots(row, payload);
    }
  }
}

function linkDots(row: HTMLElement, _payload: OperatorsPayload): void {
  const svg = row.querySelector('svg');
  if (!svg) return;
  const dots = [...svg.querySelectorAll('circle.glyph-dot')];
  for (let i = 0; i + 1 < dots.length; i += 1) {
    const a = dots[i];
    const b = dots[i + 1];
    const line = document.createElementNS('http://www.w3.org/2000/svg', 'line');
    line.setAttribute('class', 'highlighted-link');
    line.setAttribute('data-from', a.getAttribute('data-id') ?? '');
    line.setAttribute('data-to', b.getAttribute('data-id') ?? '');
    line.setAttribute('x1', a.getAttribute('cx') ?? '0');
    line.setAttribute('y1', a.getAttribute('cy') ?? '0');
    line.setAttribute('x2', b.getAttribute('cx') ?? '0');
    line.setAttribute('y2', b.getAttribute('cy') ?? '0');
    line.setAttribute('stroke', '#e63946');
    svg.appendChild(line);
  }
}
