// Component tree with hover highlighting and checkable unit selection.
// Hovering fetches the node's descendant primitives from the server and
// hands them to the highlight callback; the view never computes descendant
// sets itself.

import type { TreeNode } from './types.js';

export interface TreeViewCallbacks {
  fetchDescendants: (nodeId: string) => Promise<string[]>;
  onHighlight: (primitiveIds: string[]) => void;
  onHighlightEnd: () => void;
  onSelectionChange: (selected: Array<{ node_id: string; name: string }>) => void;
}

export class TreeView {
  private readonly host: HTMLElement;
  private readonly callbacks: TreeViewCallbacks;
  private selected = new Map<string, string>();
  private hoverToken = 0;

  constructor(host: HTMLElement, callbacks: TreeViewCallbacks) {
    this.host = host;
    this.callbacks = callbacks;
    this.host.classList.add('tree-view');
  }

  render(root: TreeNode): void {
    this.host.innerHTML = '';
    this.selected.clear();
    this.host.appendChild(this.renderNode(root, 0));
  }

  selection(): Array<{ node_id: string; name: string }> {
    return Array.from(this.selected, ([node_id, name]) => ({ node_id, name }));
  }

  showError(message: string): void {
    let note = this.host.querySelector<HTMLElement>('.tree-error');
    if (!note) {
      note = document.createElement('p');
      note.className = 'tree-error';
      this.host.prepend(note);
    }
    note.textContent = message;
  }

  clearError(): void {
    this.host.querySelector('.tree-error')?.remove();
  }

  private renderNode(node: TreeNode, depth: number): HTMLElement {
    const item = document.createElement('div');
    item.className = 'tree-node';
    item.dataset.nodeId = node.node_id;

    const row = document.createElement('div');
    row.className = 'tree-row';
    row.style.paddingLeft = `${depth * 16}px`;

    const checkbox = document.createElement('input');
    checkbox.type = 'checkbox';
    checkbox.dataset.nodeId = node.node_id;
    checkbox.addEventListener('change', () => {
      if (checkbox.checked) this.selected.set(node.node_id, node.label);
      else this.selected.delete(node.node_id);
      this.callbacks.onSelectionChange(this.selection());
    });

    const label = document.createElement('span');
    label.className = 'tree-label';
    label.textContent = node.label;
    const count = node.children.length
      ? '' : ` (${node.primitive_ids.length})`;
    const meta = document.createElement('span');
    meta.className = 'tree-meta';
    meta.textContent = `${count} · ${node.basis}`;

    row.append(checkbox, label, meta);
    row.addEventListener('mouseenter', () => this.hoverStart(node.node_id));
    row.addEventListener('mouseleave', () => this.hoverEnd());
    item.appendChild(row);

    for (const child of node.children) {
      item.appendChild(this.renderNode(child, depth + 1));
    }
    return item;
  }

  private async hoverStart(nodeId: string): Promise<void> {
    const token = ++this.hoverToken;
    try {
      const ids = await this.callbacks.fetchDescendants(nodeId);
      if (token === this.hoverToken) this.callbacks.onHighlight(ids);
    } catch {
      // highlight is best effort; a failed fetch just shows nothing
    }
  }

  private hoverEnd(): void {
    this.hoverToken += 1;
    this.callbacks.onHighlightEnd();
  }
}
