// The narrative sequence strip. Chips are drag-reorderable, but a drop is
// committed only after the server validates the proposed order: the strip
// re-renders from the server's answer and reverts (flashing the violating
// pair) when validation fails. No ordering rules live client side.

export interface ValidationOutcome {
  ok: boolean;
  order: string[];                                  // server-stored order when ok
  violations?: Array<{ from: string; to: string }>;
}

export interface SequenceStripCallbacks {
  validate: (order: string[]) => Promise<ValidationOutcome>;
  nameOf?: (unitId: string) => string;
}

export class SequenceStrip {
  private readonly host: HTMLElement;
  private readonly callbacks: SequenceStripCallbacks;
  private order: string[] = [];
  private dragged: string | null = null;
  private busy = false;

  constructor(host: HTMLElement, callbacks: SequenceStripCallbacks) {
    this.host = host;
    this.callbacks = callbacks;
    this.host.classList.add('sequence-strip');
  }

  /** Render a server-provided order; the only way order state enters. */
  setOrder(order: string[]): void {
    this.order = [...order];
    this.render();
  }

  currentOrder(): string[] {
    return [...this.order];
  }

  /** Propose moving unit to a new index; resolves once the server answered. */
  async propose(unitId: string, index: number): Promise<ValidationOutcome> {
    if (this.busy) return { ok: false, order: this.currentOrder() };
    const proposed = this.order.filter((u) => u !== unitId);
    proposed.splice(index, 0, unitId);
    this.busy = true;
    try {
      const outcome = await this.callbacks.validate(proposed);
      if (outcome.ok) {
        this.setOrder(outcome.order);
      } else {
        this.render();  // revert to the last validated order
        this.flashViolations(outcome.violations ?? []);
      }
      return outcome;
    } finally {
      this.busy = false;
    }
  }

  private render(): void {
    this.host.innerHTML = '';
    this.order.forEach((unitId, index) => {
      const chip = document.createElement('span');
      chip.className = 'seq-chip';
      chip.draggable = true;
      chip.dataset.unitId = unitId;
      chip.textContent = this.callbacks.nameOf?.(unitId) ?? unitId;
      chip.addEventListener('dragstart', () => { this.dragged = unitId; });
      chip.addEventListener('dragover', (ev) => ev.preventDefault());
      chip.addEventListener('drop', (ev) => {
        ev.preventDefault();
        if (this.dragged && this.dragged !== unitId) {
          void this.propose(this.dragged, index);
        }
        this.dragged = null;
      });
      this.host.appendChild(chip);
    });
  }

  private flashViolations(violations: Array<{ from: string; to: string }>): void {
    for (const violation of violations) {
      for (const uid of [violation.from, violation.to]) {
        const chip = this.host.querySelector(`[data-unit-id="${uid}"]`);
        chip?.classList.add('seq-violation');
      }
    }
    setTimeout(() => {
      this.host.querySelectorAll('.seq-violation')
        .forEach((el) => el.classList.remove('seq-violation'));
    }, 1200);
  }
}
