// Embeds the primitive-tagged SVG and drives hover highlighting. The ids
// to highlight always come from the server's descendants endpoint, never
// from walking the DOM.

export class SvgPreview {
  private readonly host: HTMLElement;

  constructor(host: HTMLElement) {
    this.host = host;
    this.host.classList.add('svg-preview');
  }

  setMarkup(svgMarkup: string): void {
    this.host.innerHTML = svgMarkup;
  }

  highlight(primitiveIds: string[]): void {
    this.clearHighlight();
    for (const id of primitiveIds) {
      const el = this.host.querySelector(`[data-prim="${id}"]`);
      if (el) el.classList.add('nv-highlight');
    }
  }

  clearHighlight(): void {
    this.host.querySelectorAll('.nv-highlight')
      .forEach((el) => el.classList.remove('nv-highlight'));
  }

  highlightedCount(): number {
    return this.host.querySelectorAll('.nv-highlight').length;
  }
}
