/**
 * The single client-side store. Every view renders from this state and
 * mutates it only through update(); listeners re-render on change
 * (unidirectional data flow, which is what keeps the five views' linked
 * highlighting consistent).
 */

export type SizeMapping =
  | 'nearest_reference'
  | 'nearest_neighbor_objective'
  | 'nearest_neighbor_decision';

export interface SelectionState {
  run: string | null;
  range: { from: number; to: number } | null;
  selectedIds: number[];
  sizeMapping: SizeMapping;
  operatorGeneration: number | null;
  highlightedId: number | null;
}

export type Listener = (state: SelectionState, previous: SelectionState) => void;

export class Store {
  private state: SelectionState = {
    run: null,
    range: null,
    selectedIds: [],
    sizeMapping: 'nearest_reference',
    operatorGeneration: null,
    highlightedId: null,
  };

  private listeners: Listener[] = [];

  get(): SelectionState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<SelectionState>): void {
    const previous = this.state;
    this.state = { ...previous, ...patch };
    for (const listener of this.listeners) listener(this.state, previous);
  }

  selectRun(run: string): void {
    this.update({
      run,
      range: null,
      selectedIds: [],
      operatorGeneration: null,
      highlightedId: null,
    });
  }

  /** Brushing or clicking the quality charts sets the generation range. */
  selectRange(from: number, to: number): void {
    this.update({
      range: { from, to },
      selectedIds: [],
      operatorGeneration: null,
      highlightedId: null,
    });
  }

  toggleIndividual(id: number): void {
    const current = this.state.selectedIds;
    const selectedIds = current.includes(id)
      ? current.filter((i) => i !== id)
      : [...current, id];
    this.update({ selectedIds, highlightedId: id });
  }
}
