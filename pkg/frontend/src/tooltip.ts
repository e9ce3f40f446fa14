/** Shared hover tooltip: generation, id, origin, distances, objectives, survival. */

import type { OriginName } from './api';
import { ORIGIN_LABELS } from './colors';

export interface TooltipFields {
  generation: number;
  id: number;
  origin: OriginName;
  nearestReference: number;
  objectives: number[];
  survived: boolean;
}

let element: HTMLDivElement | null = null;

function host(): HTMLDivElement {
  if (!element || !element.isConnected) {
    element = document.createElement('div');
    element.className = 'tooltip';
    element.style.display = 'none';
    document.body.appendChild(element);
  }
  return element;
}

export function showTooltip(fields: TooltipFields, x: number, y: number): void {
  const el = host();
  el.innerHTML = [
    `<div><b>#${fields.id}</b> — generation ${fields.generation}</div>`,
    `<div>origin: ${ORIGIN_LABELS[fields.origin]}</div>`,
    `<div>nearest reference: ${fields.nearestReference.toPrecision(4)}</div>`,
    `<div>objectives: [${fields.objectives.map((v) => v.toPrecision(4)).join(', ')}]</div>`,
    `<div>${fields.survived ? 'survived selection' : 'did not survive selection'}</div>`,
  ].join('');
  el.style.display = 'block';
  el.style.left = `${x + 12}px`;
  el.style.top = `${y + 12}px`;
}

export function hideTooltip(): void {
  if (element) element.style.display = 'none';
}
