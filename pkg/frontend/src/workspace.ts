/**
 * The main workspace: one column per selected generation, each with the
 * objective-space scatter (shared PCA coordinates over the reference density
 * map) stacked above the decision-space scatter (shared t-SNE embedding).
 * Dot color encodes the individual's role in that generation, dot size the
 * selected quality measure; individuals that failed selection render as
 * crosses and never reappear in later columns. Selecting a dot overlays
 * parental curves back through the range, colored by the offspring's origin
 * with thickness proportional to the objective-space distance carried by the
 * lineage payload. A plus control between adjacent columns opens the
 * operator view for the later generation.
 */

import * as d3 from 'd3';

import type {
  GenerationColumn,
  GenerationsPayload,
  LineagePayload,
  OriginName,
} from './api';
import { decodeScore } from './api';
import { originColor } from './colors';
import type { SizeMapping, Store } from './state';
import { hideTooltip, showTooltip } from './tooltip';

const PLOT = 190;
const PAD = 18;

interface DotPosition {
  x: number;
  y: number;
  column: number;
  space: 'objective' | 'decision';
}

export function renderWorkspace(
  container: HTMLElement,
  payload: GenerationsPayload,
  lineage: LineagePayload | null,
  store: Store,
): void {
  container.innerHTML = '';
  container.classList.add('workspace');
  const state = store.get();

  const columnsHost = document.createElement('div');
  columnsHost.className = 'workspace-columns';
  container.appendChild(columnsHost);

  const pcaExtent = sharedExtent(payload.generations.map((g) => g.pca));
  const tsneExtent = sharedExtent(payload.generations.map((g) => g.tsne));
  const positions = new Map<string, DotPosition>();

  payload.generations.forEach((column, index) => {
    const columnHost = document.createElement('div');
    columnHost.className = 'generation-column';
    columnHost.dataset.generation = String(column.generation);
    columnsHost.appendChild(columnHost);

    const title = document.createElement('div');
    title.className = 'column-title';
    title.textContent = `generation ${column.generation}`;
    columnHost.appendChild(title);

    drawScatter(columnHost, column, 'objective', pcaExtent, payload, store, positions);
    drawScatter(columnHost, column, 'decision', tsneExtent, payload, store, positions);

    if (index < payload.generations.length - 1) {
      const next = payload.generations[index + 1].generation;
      const plus = document.createElement('button');
      plus.className = 'operator-expand';
      plus.dataset.generation = String(next);
      plus.textContent = '+';
      plus.title = `inspect the operators producing generation ${next}`;
      plus.addEventListener('click', () => store.update({ operatorGeneration: next }));
      columnsHost.appendChild(plus);
    }
  });

  if (lineage && state.selectedIds.length > 0) {
    drawLineageCurves(columnsHost, payload, lineage, positions);
  }
}

function sharedExtent(flatPairs: number[][]): { x: [number, number]; y: [number, number] } {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const flat of flatPairs) {
    for (let i = 0; i < flat.length; i += 2) {
      xs.push(flat[i]);
      ys.push(flat[i + 1]);
    }
  }
  return {
    x: expand(d3.extent(xs) as [number, number]),
    y: expand(d3.extent(ys) as [number, number]),
  };
}

function expand([lo, hi]: [number, number]): [number, number] {
  const span = hi - lo || 1;
  return [lo - 0.05 * span, hi + 0.05 * span];
}

function sizeValues(column: GenerationColumn, mapping: SizeMapping): number[] {
  const raw = column[mapping];
  return raw.map((v) => decodeScore(v as number | string));
}

function drawScatter(
  host: HTMLElement,
  column: GenerationColumn,
  space: 'objective' | 'decision',
  extent: { x: [number, number]; y: [number, number] },
  payload: GenerationsPayload,
  store: Store,
  positions: Map<string, DotPosition>,
): void {
  const state = store.get();
  const coords = space === 'objective' ? column.pca : column.tsne;
  const svg = d3
    .select(host)
    .append('svg')
    .attr('class', `scatter ${space}-scatter`)
    .attr('data-generation', column.generation)
    .attr('width', PLOT)
    .attr('height', PLOT);

  const x = d3.scaleLinear().domain(extent.x).range([PAD, PLOT - PAD]);
  const y = d3.scaleLinear().domain(extent.y).range([PLOT - PAD, PAD]);

  if (space === 'objective') {
    drawDensity(svg, payload, x, y);
  }

  const sizes = sizeValues(column, state.sizeMapping);
  const finite = sizes.filter((v) => Number.isFinite(v));
  const sizeScale = d3
    .scaleSqrt()
    .domain([d3.min(finite) ?? 0, d3.max(finite) ?? 1])
    .range([2.2, 7]);

  column.ids.forEach((id, i) => {
    const px = x(coords[2 * i]);
    const py = y(coords[2 * i + 1]);
    positions.set(`${column.generation}:${space}:${id}`, {
      x: px,
      y: py,
      column: column.generation,
      space,
    });
    const survived = column.survived[i];
    const origin = column.origins[i];
    const selected = state.selectedIds.includes(id);
    const radius = Number.isFinite(sizes[i]) ? sizeScale(sizes[i]) : 7;

    const mark = survived
      ? svg
          .append('circle')
          .attr('cx', px)
          .attr('cy', py)
          .attr('r', radius)
      : svg
          .append('path')
          .attr('d', crossPath(px, py, radius))
          .attr('stroke-width', 1.6);
    mark
      .attr(
        'class',
        `individual ${survived ? 'survivor' : 'cross'}${selected ? ' selected' : ''}`,
      )
      .attr('data-id', id)
      .attr('data-origin', origin)
      .attr('data-survived', String(survived))
      .attr(survived ? 'fill' : 'stroke', originColor(origin))
      .on('click', () => store.toggleIndividual(id))
      .on('mousemove', (event: MouseEvent) =>
        showTooltip(
          {
            generation: column.generation,
            id,
            origin: origin as OriginName,
            nearestReference: column.nearest_reference[i],
            objectives: column.objectives.slice(i * payload.m, (i + 1) * payload.m),
            survived,
          },
          event.pageX ?? 0,
          event.pageY ?? 0,
        ),
      )
      .on('mouseleave', () => hideTooltip());
    if (!survived) mark.attr('fill', 'none');
  });
}

function crossPath(x: number, y: number, r: number): string {
  return `M${x - r},${y - r}L${x + r},${y + r}M${x - r},${y + r}L${x + r},${y - r}`;
}

function drawDensity(
  svg: d3.Selection<SVGSVGElement, unknown, null, undefined>,
  payload: GenerationsPayload,
  x: d3.ScaleLinear<number, number>,
  y: d3.ScaleLinear<number, number>,
): void {
  const grid = payload.density_grid;
  const group = svg.append('g').attr('class', 'density-layer');
  const cellW = (grid.x_max - grid.x_min) / grid.width;
  const cellH = (grid.y_max - grid.y_min) / grid.height;
  for (let row = 0; row < grid.height; row += 1) {
    for (let col = 0; col < grid.width; col += 1) {
      const value = grid.values[row * grid.width + col];
      if (value < 0.02) continue;
      const cx = grid.x_min + (col + 0.5) * cellW;
      const cy = grid.y_min + (row + 0.5) * cellH;
      group
        .append('rect')
        .attr('class', 'density-cell')
        .attr('x', x(cx - cellW / 2))
        .attr('y', y(cy + cellH / 2))
        .attr('width', Math.abs(x(cellW) - x(0)))
        .attr('height', Math.abs(y(cellH) - y(0)))
        .attr('fill', '#4895ef')
        .attr('fill-opacity', 0.5 * value);
    }
  }
}

interface DisplayLink {
  child: number;
  parent: number;
  generation: number; // column of the child end
  relation: string;
  distance: number;
  childOrigin: OriginName;
}

/**
 * Collapse lineage-tree edges into column-to-column links: crossover edges
 * connect to the previous column, a mutant's links jump through its
 * (never-displayed) pre-image to the mating parents, and reserved-self edges
 * connect an individual to itself one column earlier.
 */
export function displayLinks(
  payload: GenerationsPayload,
  lineage: LineagePayload,
): DisplayLink[] {
  const roleOf = new Map<string, OriginName>();
  for (const column of payload.generations) {
    column.ids.forEach((id, i) => roleOf.set(`${column.generation}:${id}`, column.origins[i]));
  }
  const links: DisplayLink[] = [];
  for (const tree of lineage.trees) {
    const byChild = new Map<number, typeof tree.edges>();
    for (const edge of tree.edges) {
      const list = byChild.get(edge.child) ?? [];
      list.push(edge);
      byChild.set(edge.child, list);
    }
    for (const edge of tree.edges) {
      const childOrigin = roleOf.get(`${edge.generation}:${edge.child}`);
      if (!childOrigin) continue; // child end not displayed in the range
      if (edge.relation === 'crossover') {
        links.push({
          child: edge.child,
          parent: edge.parent,
          generation: edge.generation,
          relation: edge.relation,
          distance: edge.objective_distance,
          childOrigin,
        });
      } else if (edge.relation === 'mutation_pre_image') {
        for (const hop of byChild.get(edge.parent) ?? []) {
          if (hop.relation === 'crossover') {
            links.push({
              child: edge.child,
              parent: hop.parent,
              generation: edge.generation,
              relation: 'mutation_via_pre_image',
              distance: hop.objective_distance,
              childOrigin,
            });
          }
        }
      } else {
        links.push({
          child: edge.child,
          parent: edge.parent,
          generation: edge.generation,
          relation: edge.relation,
          distance: edge.objective_distance,
          childOrigin,
        });
      }
    }
  }
  return links;
}

function drawLineageCurves(
  columnsHost: HTMLElement,
  payload: GenerationsPayload,
  lineage: LineagePayload,
  positions: Map<string, DotPosition>,
): void {
  const links = displayLinks(payload, lineage);
  const distances = links.map((l) => l.distance);
  const width = d3
    .scaleLinear()
    .domain([0, d3.max(distances) || 1])
    .range([0.8, 4]);

  const overlay = d3
    .select(columnsHost)
    .append('svg')
    .attr('class', 'lineage-curves')
    .attr('width', columnsHost.scrollWidth || 1200)
    .attr('height', 460);

  for (const link of links) {
    for (const space of ['objective', 'decision'] as const) {
      const childPos = positions.get(`${link.generation}:${space}:${link.child}`);
      const parentPos = positions.get(`${link.generation - 1}:${space}:${link.parent}`);
      if (!childPos || !parentPos) continue;
      overlay
        .append('path')
        .attr('class', 'lineage-curve')
        .attr('data-child', link.child)
        .attr('data-parent', link.parent)
        .attr('data-generation', link.generation)
        .attr('data-relation', link.relation)
        .attr('data-space', space)
        .attr('fill', 'none')
        .attr('stroke', originColor(link.childOrigin))
        .attr('stroke-width', width(link.distance))
        .attr(
          'd',
          curveBetween(columnOffset(link.generation, payload), childPos, columnOffset(link.generation - 1, payload), parentPos),
        );
    }
  }
}

function columnOffset(generation: number, payload: GenerationsPayload): number {
  return (generation - payload.from) * (PLOT + 36);
}

function curveBetween(
  childBase: number,
  child: DotPosition,
  parentBase: number,
  parent: DotPosition,
): string {
  const yOffset = child.space === 'decision' ? PLOT + 26 : 0;
  const x1 = childBase + child.x;
  const y1 = yOffset + child.y;
  const x2 = parentBase + parent.x;
  const y2 = yOffset + parent.y;
  const mx = (x1 + x2) / 2;
  return `M${x1},${y1}C${mx},${y1},${mx},${y2},${x2},${y2}`;
}
