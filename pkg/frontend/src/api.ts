/**
 * Typed client for the analysis API. The UI derives every number it shows
 * from these payloads; nothing is recomputed locally. Fitness scores may
 * arrive as the strings "Infinity" / "-Infinity" (crowding boundaries) and
 * are decoded here.
 */

export type OriginName =
  | 'reserved'
  | 'mating_pool'
  | 'crossover_offspring'
  | 'mutated_offspring';

export interface RunSummary {
  name: string;
  status: 'ok' | 'invalid';
  problem?: string;
  algorithm?: string;
  mu?: number;
  generations?: number;
  seed?: number;
  error?: string;
}

export interface OriginCounts {
  survived: number;
  died: number;
}

export interface OverviewPayload {
  mu: number;
  generations: number;
  quality_series: {
    generation: number[];
    igd: number[];
    hv: number[];
    sp: number[];
    ms: number[];
  };
  origin_statistics: Array<
    { generation: number } & Record<OriginName, OriginCounts>
  >;
}

export interface GenerationColumn {
  generation: number;
  ids: number[];
  origins: OriginName[];
  survived: boolean[];
  objectives: number[]; // flat, m per individual
  pca: number[]; // flat pairs
  tsne: number[]; // flat pairs
  nearest_reference: number[];
  nearest_neighbor_objective: Array<number | string>;
  nearest_neighbor_decision: Array<number | string>;
}

export interface DensityGridPayload {
  width: number;
  height: number;
  x_min: number;
  x_max: number;
  y_min: number;
  y_max: number;
  bandwidth: number;
  values: number[];
}

export interface GenerationsPayload {
  from: number;
  to: number;
  m: number;
  size_mapping: string;
  size_measures: string[];
  projection_mode: 'tsne' | 'pca_fallback';
  projection_cached: boolean;
  density_grid: DensityGridPayload;
  generations: GenerationColumn[];
}

export interface LineageEdge {
  child: number;
  parent: number;
  relation: 'crossover' | 'mutation_pre_image' | 'reserved_self';
  generation: number;
  objective_distance: number;
}

export interface LineageNode {
  generation: number;
  death: number | null;
  origin: OriginName | 'initial';
  objective: number[];
  decision: number[];
  pca?: [number, number];
}

export interface LineageTree {
  root: number;
  nodes: Record<string, LineageNode>;
  edges: LineageEdge[];
}

export interface LineagePayload {
  ids: number[];
  life_spans: Record<string, { birth: number; death: number | null }>;
  trees: LineageTree[];
  common_ancestors: { generation: number; ids: number[]; canonical: number } | null;
}

export interface OperatorPair {
  parent_a: number;
  parent_b: number;
  offspring: number[];
  beta: number;
  perturbation_magnitudes: number[];
  parent_parent_distance: number;
  offspring_parent_distances: number[][];
  nearest_reference: Record<string, number>;
}

export interface OperatorMutation {
  offspring: number;
  mutant: number;
  delta: number[];
  delta_normalized: number[];
  distance: number;
  pre_objective: number[];
  post_objective: number[];
  pre_nearest_reference: number;
  post_nearest_reference: number;
}

export interface SelectionGroupPayload {
  rank: number;
  total: number;
  survived: number;
  origin_counts: Record<OriginName, number>;
  members: Array<{
    id: number;
    origin: OriginName;
    fitness: number | string;
    survived: boolean;
  }>;
}

export interface OperatorsPayload {
  generation: number;
  n: number;
  pairs: OperatorPair[];
  mutations: OperatorMutation[];
  selection: { prioritized: boolean; groups: SelectionGroupPayload[] };
}

/** Decode the store's non-finite encoding back into a number. */
export function decodeScore(value: number | string): number {
  if (value === 'Infinity') return Infinity;
  if (value === '-Infinity') return -Infinity;
  if (value === 'NaN') return NaN;
  return value as number;
}

export class ApiClient {
  constructor(private base: string = '') {}

  private controllers = new Map<string, AbortController>();

  /**
   * Fetch JSON, cancelling any in-flight request sharing the same slot
   * (selection changes abort superseded requests).
   */
  private async get<T>(path: string, slot?: string): Promise<T> {
    let signal: AbortSignal | undefined;
    if (slot) {
      this.controllers.get(slot)?.abort();
      const controller = new AbortController();
      this.controllers.set(slot, controller);
      signal = controller.signal;
    }
    const response = await fetch(this.base + path, { signal });
    if (!response.ok) {
      const body = await response.json().catch(() => ({}));
      throw new Error(
        (body as { detail?: string }).detail ?? `${response.status} for ${path}`,
      );
    }
    return (await response.json()) as T;
  }

  listRuns(): Promise<RunSummary[]> {
    return this.get('/runs');
  }

  overview(run: string): Promise<OverviewPayload> {
    return this.get(`/runs/${run}/overview`, 'overview');
  }

  generations(run: string, from: number, to: number): Promise<GenerationsPayload> {
    return this.get(`/runs/${run}/generations?from=${from}&to=${to}`, 'generations');
  }

  lineage(run: string, ids: number[]): Promise<LineagePayload> {
    return this.get(`/runs/${run}/lineage?ids=${ids.join(',')}`, 'lineage');
  }

  operators(run: string, generation: number): Promise<OperatorsPayload> {
    return this.get(`/runs/${run}/operators/${generation}`, 'operators');
  }
}
