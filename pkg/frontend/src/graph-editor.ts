// Node-link editor for unit relationships. Units sit on a circle; dragging
// from one node to another proposes an edge and the kind picker appears.
// Dependent edges render as single-arrow lines, independent ones as double
// arrows. The server owns cycle checking; a rejected edge flashes the pair.

import type { GraphEdge, RelationKind } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export interface GraphEditorCallbacks {
  onRelate: (a: string, b: string, kind: RelationKind) => Promise<void>;
  nameOf?: (unitId: string) => string;
}

export class GraphEditor {
  private readonly host: HTMLElement;
  private readonly callbacks: GraphEditorCallbacks;
  private units: string[] = [];
  private edges: GraphEdge[] = [];
  private linkSource: string | null = null;

  constructor(host: HTMLElement, callbacks: GraphEditorCallbacks) {
    this.host = host;
    this.callbacks = callbacks;
    this.host.classList.add('graph-editor');
  }

  setGraph(units: string[], edges: GraphEdge[]): void {
    this.units = [...units];
    this.edges = [...edges];
    this.render();
  }

  flashPair(a: string, b: string): void {
    for (const uid of [a, b]) {
      this.host.querySelector(`[data-unit-node="${uid}"]`)
        ?.classList.add('graph-error');
    }
    setTimeout(() => {
      this.host.querySelectorAll('.graph-error')
        .forEach((el) => el.classList.remove('graph-error'));
    }, 1200);
  }

  private positions(): Map<string, { x: number; y: number }> {
    const out = new Map<string, { x: number; y: number }>();
    const n = Math.max(this.units.length, 1);
    this.units.forEach((uid, i) => {
      const angle = (2 * Math.PI * i) / n - Math.PI / 2;
      out.set(uid, { x: 160 + 120 * Math.cos(angle), y: 150 + 110 * Math.sin(angle) });
    });
    return out;
  }

  private render(): void {
    this.host.innerHTML = '';
    const svg = document.createElementNS(SVG_NS, 'svg');
    svg.setAttribute('viewBox', '0 0 320 300');
    svg.setAttribute('class', 'graph-canvas');

    const defs = document.createElementNS(SVG_NS, 'defs');
    defs.innerHTML =
      '<marker id="ge-arrow" viewBox="0 0 10 10" refX="9" refY="5" '
      + 'markerWidth="6" markerHeight="6" orient="auto-start-reverse">'
      + '<path d="M 0 0 L 10 5 L 0 10 z"/></marker>';
    svg.appendChild(defs);

    const pos = this.positions();
    for (const edge of this.edges) {
      const from = pos.get(edge.from);
      const to = pos.get(edge.to);
      if (!from || !to) continue;
      const line = document.createElementNS(SVG_NS, 'line');
      line.setAttribute('x1', String(from.x));
      line.setAttribute('y1', String(from.y));
      line.setAttribute('x2', String(to.x));
      line.setAttribute('y2', String(to.y));
      line.setAttribute('class', `graph-edge graph-edge-${edge.kind}`);
      line.setAttribute('data-edge', `${edge.from}->${edge.to}`);
      line.setAttribute('marker-end', 'url(#ge-arrow)');
      if (edge.kind === 'independent') {
        line.setAttribute('marker-start', 'url(#ge-arrow)');
      }
      svg.appendChild(line);
    }

    for (const uid of this.units) {
      const { x, y } = pos.get(uid)!;
      const group = document.createElementNS(SVG_NS, 'g');
      group.setAttribute('data-unit-node', uid);
      group.setAttribute('transform', `translate(${x},${y})`);
      const circle = document.createElementNS(SVG_NS, 'circle');
      circle.setAttribute('r', '26');
      circle.setAttribute('class', 'graph-node');
      const label = document.createElementNS(SVG_NS, 'text');
      label.setAttribute('text-anchor', 'middle');
      label.setAttribute('dy', '4');
      label.textContent = this.callbacks.nameOf?.(uid) ?? uid;
      group.append(circle, label);
      group.addEventListener('click', () => this.handleClick(uid));
      svg.appendChild(group);
    }
    this.host.appendChild(svg);

    const hint = document.createElement('p');
    hint.className = 'graph-hint';
    hint.textContent = this.linkSource
      ? `Linking from ${this.linkSource}: click a second unit`
      : 'Click two units to relate them';
    this.host.appendChild(hint);
  }

  private handleClick(uid: string): void {
    if (!this.linkSource) {
      this.linkSource = uid;
      this.render();
      return;
    }
    if (this.linkSource === uid) {
      this.linkSource = null;
      this.render();
      return;
    }
    const source = this.linkSource;
    this.linkSource = null;
    this.showKindPicker(source, uid);
  }

  private showKindPicker(a: string, b: string): void {
    const picker = document.createElement('div');
    picker.className = 'kind-picker';
    const prompt = document.createElement('p');
    prompt.textContent = `${b} ... ${a}?`;
    picker.appendChild(prompt);
    const options: Array<[RelationKind, string]> = [
      ['dependent', `${b} depends on ${a}`],
      ['independent', 'independent (explain together)'],
      ['none', 'clear relation'],
    ];
    for (const [kind, text] of options) {
      const button = document.createElement('button');
      button.type = 'button';
      button.textContent = text;
      button.addEventListener('click', () => {
        picker.remove();
        void this.callbacks.onRelate(a, b, kind).catch(() => this.flashPair(a, b));
      });
      picker.appendChild(button);
    }
    this.host.appendChild(picker);
  }
}
