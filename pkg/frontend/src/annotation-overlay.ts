// Editing overlay: draggable handles over the SVG preview for a slide's
// annotation steps. Dragging moves every anchor point by the same delta;
// Save hands the new geometry back (the app persists it through slide
// PATCHes, the overlay holds view state only).

import type { StepJson } from './types.js';

export interface OverlayCallbacks {
  onSave: (stepId: string, geometry: Array<[number, number]>) => Promise<void>;
}

interface DragState {
  stepId: string;
  startX: number;
  startY: number;
  original: Array<[number, number]>;
}

export class AnnotationOverlay {
  private readonly svgHost: HTMLElement;
  private readonly callbacks: OverlayCallbacks;
  private geometries = new Map<string, Array<[number, number]>>();
  private drag: DragState | null = null;

  constructor(svgHost: HTMLElement, callbacks: OverlayCallbacks) {
    this.svgHost = svgHost;
    this.callbacks = callbacks;
  }

  setSteps(steps: StepJson[]): void {
    this.geometries.clear();
    for (const step of steps) {
      if (step.kind !== 'annotation') continue;
      const geometry = (step.geometry as Array<[number, number]>) ?? [];
      this.geometries.set(step.step_id, geometry.map(([x, y]) => [x, y]));
    }
    this.render();
  }

  geometryOf(stepId: string): Array<[number, number]> | undefined {
    return this.geometries.get(stepId)?.map(([x, y]) => [x, y]);
  }

  moveBy(stepId: string, dx: number, dy: number): void {
    const geometry = this.geometries.get(stepId);
    if (!geometry) return;
    this.geometries.set(stepId,
      geometry.map(([x, y]) => [x + dx, y + dy] as [number, number]));
    this.render();
  }

  async save(stepId: string): Promise<void> {
    const geometry = this.geometryOf(stepId);
    if (geometry) await this.callbacks.onSave(stepId, geometry);
  }

  private svgRoot(): SVGSVGElement | null {
    return this.svgHost.querySelector('svg');
  }

  private render(): void {
    const svg = this.svgRoot();
    if (!svg) return;
    svg.querySelectorAll('.anno-handle').forEach((el) => el.remove());
    for (const [stepId, geometry] of this.geometries) {
      const [x, y] = geometry[0] ?? [0, 0];
      const handle = document.createElementNS('http://www.w3.org/2000/svg', 'circle');
      handle.setAttribute('cx', String(x));
      handle.setAttribute('cy', String(y));
      handle.setAttribute('r', '7');
      handle.setAttribute('class', 'anno-handle');
      handle.setAttribute('data-step-handle', stepId);
      handle.addEventListener('pointerdown', (ev) => {
        this.drag = {
          stepId,
          startX: (ev as PointerEvent).clientX,
          startY: (ev as PointerEvent).clientY,
          original: geometry.map(([px, py]) => [px, py]),
        };
      });
      svg.appendChild(handle);
    }
    svg.onpointermove = (ev) => {
      if (!this.drag) return;
      const dx = ev.clientX - this.drag.startX;
      const dy = ev.clientY - this.drag.startY;
      this.geometries.set(this.drag.stepId, this.drag.original.map(
        ([px, py]) => [px + dx, py + dy] as [number, number]));
      this.render();
    };
    svg.onpointerup = () => {
      if (!this.drag) return;
      const finished = this.drag.stepId;
      this.drag = null;
      void this.save(finished);
    };
  }
}
