/**
 * The fixed four-origin palette, applied identically in every view:
 * light blue for reserved individuals, green for the mating pool, purple
 * for crossover offspring, yellow for mutated offspring. Initial-population
 * members only ever appear through their per-generation role, so they never
 * need a fifth color in any view.
 */

import type { OriginName } from './api';

export const ORIGIN_COLORS: Record<OriginName, string> = {
  reserved: '#8ecae6',
  mating_pool: '#57a773',
  crossover_offspring: '#9d4edd',
  mutated_offspring: '#f4b942',
};

export const ORIGIN_LABELS: Record<OriginName, string> = {
  reserved: 'Reserved',
  mating_pool: 'Mating pool',
  crossover_offspring: 'Crossover offspring',
  mutated_offspring: 'Mutated offspring',
};

export const ORIGIN_ORDER: OriginName[] = [
  'reserved',
  'mating_pool',
  'crossover_offspring',
  'mutated_offspring',
];

export function originColor(origin: string): string {
  return ORIGIN_COLORS[origin as OriginName] ?? '#999999';
}

/** Lineage-arrow shade: lighter tones for earlier generations. */
export function generationShade(generation: number, minGen: number, maxGen: number): number {
  if (maxGen <= minGen) return 1;
  return 0.25 + (0.75 * (generation - minGen)) / (maxGen - minGen);
}
