/**
 * App wiring: a run selector plus the four analysis views, all rendering
 * from the single SelectionState store. State changes trigger the matching
 * fetches (aborting superseded ones) and re-renders; no view computes any
 * analysis value itself.
 */

import { ApiClient } from './api';
import type { GenerationsPayload, LineagePayload, OperatorsPayload } from './api';
import { renderOverview } from './overview';
import { renderWorkspace } from './workspace';
import { renderLineage } from './lineage';
import { applyHighlight, renderOperatorView } from './operators';
import { Store } from './state';
import type { SizeMapping } from './state';

export function mountApp(root: HTMLElement, api: ApiClient = new ApiClient()): Store {
  const store = new Store();
  root.innerHTML = `
    <header class="app-header">
      <h1>evotrace</h1>
      <select id="run-select"><option value="">select a run…</option></select>
      <select id="size-select">
        <option value="nearest_reference">size: nearest reference</option>
        <option value="nearest_neighbor_objective">size: nearest neighbor (objective)</option>
        <option value="nearest_neighbor_decision">size: nearest neighbor (decision)</option>
      </select>
    </header>
    <div id="error-banner" class="error-banner" style="display:none"></div>
    <section id="overview"></section>
    <section id="workspace"></section>
    <section id="lineage"></section>
    <section id="operators"></section>
    <div id="empty-state">No runs loaded.</div>
  `;

  const overviewHost = root.querySelector<HTMLElement>('#overview')!;
  const workspaceHost = root.querySelector<HTMLElement>('#workspace')!;
  const lineageHost = root.querySelector<HTMLElement>('#lineage')!;
  const operatorsHost = root.querySelector<HTMLElement>('#operators')!;
  const emptyState = root.querySelector<HTMLElement>('#empty-state')!;
  const errorBanner = root.querySelector<HTMLElement>('#error-banner')!;
  const runSelect = root.querySelector<HTMLSelectElement>('#run-select')!;
  const sizeSelect = root.querySelector<HTMLSelectElement>('#size-select')!;

  let generationsPayload: GenerationsPayload | null = null;
  let lineagePayload: LineagePayload | null = null;
  let operatorsPayload: OperatorsPayload | null = null;

  function fail(error: unknown): void {
    errorBanner.textContent = String(error instanceof Error ? error.message : error);
    errorBanner.style.display = 'block';
  }

  function clearError(): void {
    errorBanner.style.display = 'none';
  }

  runSelect.addEventListener('change', () => {
    if (runSelect.value) store.selectRun(runSelect.value);
  });
  sizeSelect.addEventListener('change', () => {
    store.update({ sizeMapping: sizeSelect.value as SizeMapping });
  });

  store.subscribe((state, previous) => {
    if (state.run && state.run !== previous.run) {
      clearError();
      workspaceHost.innerHTML = '';
      lineageHost.innerHTML = '';
      operatorsHost.innerHTML = '';
      generationsPayload = null;
      lineagePayload = null;
      operatorsPayload = null;
      api
        .overview(state.run)
        .then((payload) => renderOverview(overviewHost, payload, store))
        .catch(fail);
    }

    if (
      state.run &&
      state.range &&
      (state.range !== previous.range || state.run !== previous.run)
    ) {
      clearError();
      api
        .generations(state.run, state.range.from, state.range.to)
        .then((payload) => {
          generationsPayload = payload;
          lineagePayload = null;
          renderWorkspace(workspaceHost, payload, null, store);
        })
        .catch(fail);
    }

    // switching the size mapping re-renders from the cached payload; the
    // embedding is not refetched
    if (state.sizeMapping !== previous.sizeMapping && generationsPayload) {
      renderWorkspace(workspaceHost, generationsPayload, lineagePayload, store);
    }

    if (
      state.run &&
      state.selectedIds.length > 0 &&
      state.selectedIds !== previous.selectedIds
    ) {
      api
        .lineage(state.run, state.selectedIds)
        .then((payload) => {
          lineagePayload = payload;
          if (generationsPayload) {
            renderWorkspace(workspaceHost, generationsPayload, payload, store);
          }
          renderLineage(lineageHost, payload);
        })
        .catch(fail);
    }
    if (state.selectedIds.length === 0 && previous.selectedIds.length > 0) {
      lineagePayload = null;
      lineageHost.innerHTML = '';
      if (generationsPayload) {
        renderWorkspace(workspaceHost, generationsPayload, null, store);
      }
    }

    if (
      state.run &&
      state.operatorGeneration !== null &&
      state.operatorGeneration !== previous.operatorGeneration
    ) {
      api
        .operators(state.run, state.operatorGeneration)
        .then((payload) => {
          operatorsPayload = payload;
          renderOperatorView(operatorsHost, payload, store);
        })
        .catch(fail);
    }

    if (state.highlightedId !== previous.highlightedId) {
      for (const host of [workspaceHost, lineageHost]) {
        host.querySelectorAll('[data-id]').forEach((el) => {
          el.classList.toggle(
            'highlighted',
            state.highlightedId !== null &&
              el.getAttribute('data-id') === String(state.highlightedId),
          );
        });
      }
      if (operatorsPayload) {
        applyHighlight(operatorsHost, state.highlightedId, operatorsPayload);
      }
    }
  });

  api
    .listRuns()
    .then((runs) => {
      emptyState.style.display = runs.length === 0 ? 'block' : 'none';
      for (const run of runs) {
        const option = document.createElement('option');
        option.value = run.status === 'ok' ? run.name : '';
        option.disabled = run.status !== 'ok';
        option.textContent =
          run.status === 'ok'
            ? `${run.name} — ${run.algorithm} on ${run.problem} (mu=${run.mu}, ${run.generations} generations)`
            : `${run.name} (invalid)`;
        runSelect.appendChild(option);
      }
    })
    .catch(fail);

  return store;
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  mountApp(document.getElementById('app')!);
}
