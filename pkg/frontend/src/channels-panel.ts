// Channels panel: one tab per channel in plan order, with enable toggles
// and the list of authored steps per channel slide. Adding a template step
// hands a prefilled step JSON to the app, which PATCHes the slide.

import type { ChannelPlan, DeckJson, SlideJson, StepJson } from './types.js';

export interface ChannelsPanelCallbacks {
  onToggle: (channel: string, enabled: boolean) => Promise<void>;
  onAddStep: (slideId: string, step: StepJson) => Promise<void>;
  onSelectStep: (slideId: string, stepId: string) => void;
}

const STEP_TEMPLATES: Array<[string, () => Omit<StepJson, 'step_id'>]> = [
  ['highlight', () => ({ kind: 'transition', effect: 'highlight',
    target_primitive_ids: 'all', duration_ms: 800, params: { dim_opacity: 0.2 } })],
  ['fade-in', () => ({ kind: 'transition', effect: 'fade_in',
    target_primitive_ids: 'all', duration_ms: 800, params: {} })],
  ['circle', () => ({ kind: 'annotation', form: 'circle',
    geometry: [[200, 150]], content: '', style: { radius: 30 } })],
  ['text', () => ({ kind: 'annotation', form: 'text',
    geometry: [[120, 60]], content: 'explain this channel', style: {} })],
  ['question', () => ({ kind: 'question', question_id: `q-${Date.now()}`,
    mode: 'single_choice', prompt: 'What does this channel encode?',
    options: ['option A', 'option B'], correct: [0] })],
];

export class ChannelsPanel {
  private readonly host: HTMLElement;
  private readonly callbacks: ChannelsPanelCallbacks;
  private plan: ChannelPlan | null = null;
  private deck: DeckJson | null = null;
  private unitId: string | null = null;
  private stepCounter = 0;

  constructor(host: HTMLElement, callbacks: ChannelsPanelCallbacks) {
    this.host = host;
    this.callbacks = callbacks;
    this.host.classList.add('channels-panel');
  }

  setState(unitId: string, plan: ChannelPlan, deck: DeckJson | null): void {
    this.unitId = unitId;
    this.plan = plan;
    this.deck = deck;
    this.render();
  }

  private slideFor(channel: string): SlideJson | undefined {
    return this.deck?.slides.find(
      (s) => s.unit_id === this.unitId && s.channel_tags.includes(channel));
  }

  private render(): void {
    this.host.innerHTML = '';
    if (!this.plan) return;
    const orphans = new Set(this.plan.orphaned_slides ?? []);
    for (const spec of this.plan.channels) {
      const box = document.createElement('details');
      box.className = 'channel-box';
      box.dataset.channel = spec.channel;
      box.open = spec.enabled;

      const summary = document.createElement('summary');
      const title = document.createElement('span');
      title.textContent = `${spec.channel} (${spec.distinct_values} values)`;
      title.className = spec.enabled ? 'channel-on' : 'channel-off';
      const toggle = document.createElement('button');
      toggle.type = 'button';
      toggle.className = 'channel-toggle';
      toggle.textContent = spec.enabled ? 'disable' : 'enable';
      toggle.addEventListener('click', (ev) => {
        ev.preventDefault();
        void this.callbacks.onToggle(spec.channel, !spec.enabled);
      });
      summary.append(title, toggle);
      box.appendChild(summary);

      const slide = this.slideFor(spec.channel);
      if (slide) {
        if (orphans.has(slide.slide_id)) {
          const warn = document.createElement('p');
          warn.className = 'orphan-warning';
          warn.textContent =
            'This channel is disabled but the slide still has authored steps.';
          box.appendChild(warn);
        }
        const steps = document.createElement('div');
        steps.className = 'step-tabs';
        for (const step of slide.steps) {
          const tab = document.createElement('button');
          tab.type = 'button';
          tab.className = `step-tab step-${step.kind}`;
          tab.textContent = step.kind === 'transition'
            ? String(step.effect) : step.kind === 'annotation'
              ? String(step.form) : 'question';
          tab.addEventListener('click',
            () => this.callbacks.onSelectStep(slide.slide_id, step.step_id));
          steps.appendChild(tab);
        }
        box.appendChild(steps);
        box.appendChild(this.renderTemplates(slide));
      } else if (spec.enabled) {
        const note = document.createElement('p');
        note.className = 'channel-note';
        note.textContent = 'No slide yet: assemble the deck to scaffold one.';
        box.appendChild(note);
      }
      this.host.appendChild(box);
    }
  }

  private renderTemplates(slide: SlideJson): HTMLElement {
    const bar = document.createElement('div');
    bar.className = 'template-bar';
    for (const [name, make] of STEP_TEMPLATES) {
      const button = document.createElement('button');
      button.type = 'button';
      button.textContent = `+ ${name}`;
      button.addEventListener('click', () => {
        this.stepCounter += 1;
        const step = { step_id: `${slide.slide_id}-ui${this.stepCounter}`, ...make() };
        void this.callbacks.onAddStep(slide.slide_id, step as StepJson);
      });
      bar.appendChild(button);
    }
    return bar;
  }
}
