import { beforeEach, describe, expect, it } from 'vitest';

import { displayLinks, renderWorkspace } from '../src/workspace';
import { Store } from '../src/state';
import { ORIGIN_COLORS } from '../src/colors';
import { click, fixtures } from './helpers';

describe('workspace', () => {
  let host: HTMLElement;
  let store: Store;

  beforeEach(() => {
    document.body.innerHTML = '<div id="host"></div>';
    host = document.getElementById('host')!;
    store = new Store();
    store.update({ run: fixtures.meta.run, range: fixtures.meta.range });
    renderWorkspace(host, fixtures.generations, null, store);
  });

  it('renders one column per generation in the brushed range', () => {
    const columns = [...host.querySelectorAll('.generation-column')];
    expect(columns.length).toBe(6);
    expect(columns.map((c) => c.getAttribute('data-generation'))).toEqual(
      fixtures.generations.generations.map((g) => String(g.generation)),
    );
  });

  it('stacks the objective scatter above the decision scatter', () => {
    for (const column of host.querySelectorAll('.generation-column')) {
      const svgs = [...column.querySelectorAll('svg.scatter')];
      expect(svgs[0].classList.contains('objective-scatter')).toBe(true);
      expect(svgs[1].classList.contains('decision-scatter')).toBe(true);
    }
  });

  it('colors dots by origin with the fixed palette', () => {
    for (const dot of host.querySelectorAll('circle.individual.survivor')) {
      const origin = dot.getAttribute('data-origin')!;
      expect(dot.getAttribute('fill')).toBe(ORIGIN_COLORS[origin as keyof typeof ORIGIN_COLORS]);
    }
  });

  it('renders non-survivors as crosses, never dots', () => {
    const crosses = [...host.querySelectorAll('.objective-scatter path.individual.cross')];
    expect(crosses.length).toBeGreaterThan(0);
    for (const cross of crosses) {
      expect(cross.getAttribute('data-survived')).toBe('false');
    }
    for (const dot of host.querySelectorAll('circle.individual')) {
      expect(dot.getAttribute('data-survived')).toBe('true');
    }
  });

  it('never shows a non-survivor in a later column', () => {
    const seenDead = new Set<string>();
    for (const column of fixtures.generations.generations) {
      for (let i = 0; i < column.ids.length; i += 1) {
        expect(seenDead.has(String(column.ids[i]))).toBe(false);
        if (!column.survived[i]) seenDead.add(String(column.ids[i]));
      }
    }
  });

  it('draws the density layer beneath the objective dots', () => {
    const svg = host.querySelector('svg.objective-scatter')!;
    const children = [...svg.children];
    const densityIndex = children.findIndex((c) => c.classList.contains('density-layer'));
    const firstDot = children.findIndex((c) => c.classList.contains('individual'));
    expect(densityIndex).toBeGreaterThanOrEqual(0);
    expect(densityIndex).toBeLessThan(firstDot);
  });

  it('offers a plus control between adjacent columns that opens the operator view', () => {
    const buttons = [...host.querySelectorAll('button.operator-expand')];
    expect(buttons.length).toBe(5); // between 6 columns
    click(buttons[1]);
    expect(store.get().operatorGeneration).toBe(
      Number(buttons[1].getAttribute('data-generation')),
    );
  });

  it('clicking a dot selects the individual', () => {
    const dot = host.querySelector('circle.individual.survivor')!;
    const id = Number(dot.getAttribute('data-id'));
    click(dot);
    expect(store.get().selectedIds).toContain(id);
  });

  it('draws lineage curves colored by offspring origin, thickness by distance', () => {
    store.update({ selectedIds: [fixtures.meta.selected_id] });
    renderWorkspace(host, fixtures.generations, fixtures.lineage, store);
    const curves = [...host.querySelectorAll('path.lineage-curve')];
    expect(curves.length).toBeGreaterThan(0);
    const links = displayLinks(fixtures.generations, fixtures.lineage);
    const maxDistance = Math.max(...links.map((l) => l.distance));
    const byWidth = new Map(
      curves.map((c) => [
        `${c.getAttribute('data-child')}->${c.getAttribute('data-parent')}@${c.getAttribute('data-generation')}`,
        Number(c.getAttribute('stroke-width')),
      ]),
    );
    for (const link of links) {
      const width = byWidth.get(`${link.child}->${link.parent}@${link.generation}`);
      if (width === undefined) continue; // parent outside the displayed range
      const expected = 0.8 + (3.2 * link.distance) / maxDistance;
      expect(width).toBeCloseTo(expected, 5);
    }
    for (const curve of curves) {
      const stroke = curve.getAttribute('stroke');
      expect(Object.values(ORIGIN_COLORS)).toContain(stroke);
    }
  });

  it('mutant curves bypass the pre-image and reach the mating parents', () => {
    const links = displayLinks(fixtures.generations, fixtures.lineage);
    const mutantLinks = links.filter((l) => l.relation === 'mutation_via_pre_image');
    expect(mutantLinks.length).toBeGreaterThan(0);
    for (const link of mutantLinks) {
      expect(link.childOrigin).toBe('mutated_offspring');
    }
  });

  it('switching the size mapping re-renders without refetching', () => {
    const before = host.querySelector('circle.individual')!.getAttribute('r');
    store.update({ sizeMapping: 'nearest_neighbor_objective' });
    renderWorkspace(host, fixtures.generations, null, store);
    const after = host.querySelector('circle.individual')!.getAttribute('r');
    expect(after).not.toBe(before); // same payload, different radii
  });

  it('shows the tooltip field list on hover', () => {
    const dot = host.querySelector('circle.individual.survivor')!;
    dot.dispatchEvent(new MouseEvent('mousemove', { bubbles: true }));
    const tooltip = document.body.querySelector('.tooltip') as HTMLElement;
    expect(tooltip.style.display).toBe('block');
    const text = tooltip.textContent!;
    expect(text).toContain(`#${dot.getAttribute('data-id')}`);
    expect(text).toContain('generation');
    expect(text).toContain('origin:');
    expect(text).toContain('nearest reference:');
    expect(text).toContain('objectives:');
    expect(text).toMatch(/survived selection|did not survive selection/);
    dot.dispatchEvent(new MouseEvent('mouseleave'));
    expect(tooltip.style.display).toBe('none');
  });
});
