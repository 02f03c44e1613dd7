// Five-panel authoring shell: Source (tree + SVG preview), Units
// (node-link + sequence strip), Channels, Editing (annotation overlay),
// and the floating annotation window, plus the feedback dashboard tab.
// All domain state is server-authoritative; this file only wires panels
// to the API client.

import { ApiError, NarvisApi } from './api.js';
import { AnnotationOverlay } from './annotation-overlay.js';
import { ChannelsPanel } from './channels-panel.js';
import { Dashboard } from './dashboard.js';
import { GraphEditor } from './graph-editor.js';
import { SequenceStrip } from './sequence-strip.js';
import { SvgPreview } from './svg-preview.js';
import { TreeView } from './tree-view.js';
import type { DeckJson, RelationKind, StepJson, Unit } from './types.js';

interface AppState {
  projectId: string | null;
  treeVersion: number;
  unitsVersion: number;
  relationsVersion: number;
  sequenceVersion: number;
  deckVersion: number;
  units: Unit[];
  deck: DeckJson | null;
  activeUnit: string | null;
  activeSlide: string | null;
  lastClick: [number, number];
}

const state: AppState = {
  projectId: null,
  treeVersion: 0,
  unitsVersion: 0,
  relationsVersion: 0,
  sequenceVersion: 0,
  deckVersion: 0,
  units: [],
  deck: null,
  activeUnit: null,
  activeSlide: null,
  lastClick: [60, 60],
};

const api = new NarvisApi('');

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

function unitName(unitId: string): string {
  return state.units.find((u) => u.unit_id === unitId)?.name ?? unitId;
}

function toast(message: string): void {
  const bar = el<HTMLElement>('status-bar');
  bar.textContent = message;
  bar.classList.add('visible');
  setTimeout(() => bar.classList.remove('visible'), 2500);
}

export function boot(): void {
  const preview = new SvgPreview(el('svg-stage'));

  const tree = new TreeView(el('tree-host'), {
    fetchDescendants: async (nodeId) => {
      if (!state.projectId) return [];
      const res = await api.getDescendants(state.projectId, nodeId);
      return res.primitive_ids;
    },
    onHighlight: (ids) => preview.highlight(ids),
    onHighlightEnd: () => preview.clearHighlight(),
    onSelectionChange: () => tree.clearError(),
  });

  const strip = new SequenceStrip(el('sequence-host'), {
    nameOf: unitName,
    validate: async (order) => {
      if (!state.projectId) return { ok: false, order };
      try {
        const res = await api.putSequence(state.projectId, state.sequenceVersion, order);
        state.sequenceVersion = res.version;
        return { ok: true, order: res.order };
      } catch (err) {
        if (err instanceof ApiError && err.violations) {
          toast(`Order conflicts with ${err.violations.length} dependency`);
          return { ok: false, order, violations: err.violations };
        }
        throw err;
      }
    },
  });

  const graph = new GraphEditor(el('graph-host'), {
    nameOf: unitName,
    onRelate: async (a, b, kind: RelationKind) => {
      if (!state.projectId) return;
      try {
        const res = await api.putRelations(state.projectId, state.relationsVersion,
          [{ a, b, kind }]);
        state.relationsVersion = res.version;
        graph.setGraph(res.units, res.edges);
        await refreshSequence();
      } catch (err) {
        if (err instanceof ApiError && err.cycle) {
          toast(`Cycle: ${err.cycle.join(' -> ')}`);
          graph.flashPair(a, b);
          return;
        }
        throw err;
      }
    },
  });

  const overlay = new AnnotationOverlay(el('svg-stage'), {
    onSave: async (stepId, geometry) => {
      if (!state.projectId || !state.deck || !state.activeSlide) return;
      const slide = state.deck.slides.find((s) => s.slide_id === state.activeSlide);
      const step = slide?.steps.find((s) => s.step_id === stepId);
      if (!slide || !step) return;
      // geometry edits go through the API as remove + re-add of the step
      let res = await api.patchSlide(state.projectId, slide.slide_id,
        state.deckVersion, { op: 'remove_step', step_id: stepId });
      state.deckVersion = res.version;
      res = await api.patchSlide(state.projectId, slide.slide_id, state.deckVersion,
        { op: 'add_step', step: { ...step, geometry } });
      state.deckVersion = res.version;
      state.deck = res.deck;
      toast('Annotation saved');
    },
  });

  const channels = new ChannelsPanel(el('channels-host'), {
    onToggle: async (channel, enabled) => {
      if (!state.projectId || !state.activeUnit) return;
      const plan = await api.getChannels(state.projectId, state.activeUnit);
      const updated = await api.patchChannels(state.projectId, state.activeUnit,
        plan.version ?? 0, { op: 'toggle', channel, enabled });
      channels.setState(state.activeUnit, updated, state.deck);
      if (updated.orphaned_slides?.length) {
        toast(`${updated.orphaned_slides.length} slide(s) now orphaned`);
      }
    },
    onAddStep: async (slideId, step: StepJson) => {
      if (!state.projectId) return;
      if (step.kind === 'annotation') {
        (step as StepJson & { geometry: number[][] }).geometry = [state.lastClick];
      }
      const res = await api.patchSlide(state.projectId, slideId, state.deckVersion,
        { op: 'add_step', step });
      state.deckVersion = res.version;
      state.deck = res.deck;
      await selectSlide(slideId);
      toast('Step added');
    },
    onSelectStep: (slideId, stepId) => {
      void selectSlide(slideId).then(() => {
        const float = el('floating-annotation');
        float.style.left = `${state.lastClick[0] + 20}px`;
        float.style.top = `${state.lastClick[1] + 20}px`;
        float.hidden = false;
        el('floating-step-id').textContent = stepId;
      });
    },
  });

  const dashboard = new Dashboard(el('dashboard-host'));

  document.addEventListener('click', (ev) => {
    state.lastClick = [ev.clientX, ev.clientY];
  });

  async function refreshSequence(): Promise<void> {
    if (!state.projectId) return;
    const res = await api.getSequence(state.projectId);
    state.sequenceVersion = res.version;
    // the strip shows the last server-validated order: the stored one if
    // the author saved any, otherwise the fresh suggestion
    strip.setOrder((res.stored ?? res.suggested).order);
  }

  async function selectSlide(slideId: string): Promise<void> {
    if (!state.projectId) return;
    const res = await api.getDeck(state.projectId);
    state.deckVersion = res.version;
    state.deck = res.deck;
    state.activeSlide = slideId;
    const slide = res.deck.slides.find((s) => s.slide_id === slideId);
    overlay.setSteps(slide?.steps ?? []);
    if (slide?.unit_id) {
      state.activeUnit = slide.unit_id;
      const plan = await api.getChannels(state.projectId, slide.unit_id);
      channels.setState(slide.unit_id, plan, res.deck);
    }
  }

  el<HTMLFormElement>('upload-form').addEventListener('submit', (ev) => {
    ev.preventDefault();
    const input = el<HTMLInputElement>('svg-file');
    const file = input.files?.[0];
    if (!file) return;
    void file.text().then(async (svg) => {
      const created = await api.createProject(svg, file.name);
      state.projectId = created.project_id;
      state.treeVersion = created.version;
      tree.render(created.root);
      preview.setMarkup(await api.getTaggedSvg(created.project_id));
      toast(`Project ${created.project_id} ready`);
    });
  });

  el<HTMLButtonElement>('make-units').addEventListener('click', () => {
    if (!state.projectId) return;
    void (async () => {
      try {
        const res = await api.putUnits(state.projectId!, state.unitsVersion || 1,
          tree.selection());
        state.unitsVersion = res.version;
        state.units = res.units;
        const relations = await api.getRelations(state.projectId!);
        state.relationsVersion = relations.version;
        graph.setGraph(relations.units, relations.edges);
        await refreshSequence();
        state.activeUnit = res.units[0]?.unit_id ?? null;
        if (state.activeUnit) {
          const plan = await api.getChannels(state.projectId!, state.activeUnit);
          channels.setState(state.activeUnit, plan, state.deck);
        }
      } catch (err) {
        if (err instanceof ApiError && err.code === 'nested_selection') {
          tree.showError('Selection rejected: one pick contains another.');
          return;
        }
        throw err;
      }
    })();
  });

  el<HTMLButtonElement>('assemble-deck').addEventListener('click', () => {
    if (!state.projectId) return;
    void api.assembleDeck(state.projectId, 'Untitled tutorial').then(async (res) => {
      state.deckVersion = res.version;
      state.deck = res.deck;
      toast(`Deck with ${res.deck.slides.length} slides`);
      const first = res.deck.slides.find((s) => s.unit_id);
      if (first) await selectSlide(first.slide_id);
    });
  });

  el<HTMLButtonElement>('compile-deck').addEventListener('click', () => {
    if (!state.projectId || !state.deck) return;
    void api.compile(state.projectId, `/decks/${state.deck.deck_id}/events`)
      .then((res) => {
        const link = el<HTMLAnchorElement>('player-link');
        link.href = res.player_url;
        link.textContent = `Open slideshow (${res.slide_count} slides)`;
        link.hidden = false;
      });
  });

  el<HTMLButtonElement>('refresh-stats').addEventListener('click', () => {
    if (!state.deck) return;
    void api.getDeckStats(state.deck.deck_id).then((stats) => dashboard.render(stats));
  });

  dashboard.render({ per_slide: [], per_student: {}, per_question: {}, comments: [] });
}

if (typeof document !== 'undefined' && document.getElementById('tree-host')) {
  boot();
}
