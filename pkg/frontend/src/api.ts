// Thin typed client for the narvis HTTP API. Every piece of domain logic
// (tree edits, sequence validation, channel detection, stats) lives server
// side; the client only moves JSON.

import type {
  ChannelPlan, DeckJson, DeckStats, RelationGraph, RelationKind,
  SequenceResponse, TreeResponse, Unit, Violation,
} from './types.js';

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly pointer?: string;
  readonly violations?: Violation[];
  readonly cycle?: string[];

  constructor(status: number, body: Record<string, unknown>) {
    super(String(body.message ?? `HTTP ${status}`));
    this.status = status;
    this.code = String(body.code ?? 'error');
    this.pointer = body.pointer as string | undefined;
    this.violations = body.violations as Violation[] | undefined;
    this.cycle = body.cycle as string[] | undefined;
  }
}

export class NarvisApi {
  constructor(private readonly base: string = '') {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const parsed = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ApiError(response.status, parsed);
    }
    return parsed as T;
  }

  createProject(svg: string, docId: string) {
    return this.request<{ project_id: string; version: number } & TreeResponse>(
      'POST', '/projects', { svg, doc_id: docId });
  }

  getTree(projectId: string) {
    return this.request<TreeResponse>('GET', `/projects/${projectId}/tree`);
  }

  editTree(projectId: string, version: number, edit: Record<string, unknown>) {
    return this.request<TreeResponse>('POST', `/projects/${projectId}/tree/edits`,
      { version, edit });
  }

  getDescendants(projectId: string, nodeId: string) {
    return this.request<{ node_id: string; primitive_ids: string[] }>(
      'GET', `/projects/${projectId}/tree/nodes/${nodeId}/descendants`);
  }

  getTaggedSvg(projectId: string): Promise<string> {
    return fetch(`${this.base}/projects/${projectId}/svg?tagged=true`)
      .then((r) => r.text());
  }

  putUnits(projectId: string, version: number,
           selections: Array<{ node_id: string; name: string }>) {
    return this.request<{ version: number; units: Unit[] }>(
      'PUT', `/projects/${projectId}/units`, { version, selections });
  }

  getChannels(projectId: string, unitId: string) {
    return this.request<ChannelPlan>(
      'GET', `/projects/${projectId}/units/${unitId}/channels`);
  }

  patchChannels(projectId: string, unitId: string, version: number,
                action: Record<string, unknown>) {
    return this.request<ChannelPlan>(
      'PATCH', `/projects/${projectId}/units/${unitId}/channels`, { version, action });
  }

  getRelations(projectId: string) {
    return this.request<RelationGraph>('GET', `/projects/${projectId}/relations`);
  }

  putRelations(projectId: string, version: number,
               relations: Array<{ a: string; b: string; kind: RelationKind }>) {
    return this.request<RelationGraph>(
      'PUT', `/projects/${projectId}/relations`, { version, relations });
  }

  getSequence(projectId: string) {
    return this.request<SequenceResponse>('GET', `/projects/${projectId}/sequence`);
  }

  putSequence(projectId: string, version: number, order: string[]) {
    return this.request<{ version: number; order: string[] }>(
      'PUT', `/projects/${projectId}/sequence`, { version, order });
  }

  assembleDeck(projectId: string, title: string) {
    return this.request<{ version: number; deck: DeckJson }>(
      'POST', `/projects/${projectId}/deck`, { title });
  }

  getDeck(projectId: string) {
    return this.request<{ version: number; deck: DeckJson }>(
      'GET', `/projects/${projectId}/deck`);
  }

  patchSlide(projectId: string, slideId: string, version: number,
             edit: Record<string, unknown>) {
    return this.request<{ version: number; deck: DeckJson }>(
      'PATCH', `/projects/${projectId}/deck/slides/${slideId}`, { version, edit });
  }

  compile(projectId: string, beaconUrl?: string) {
    return this.request<{ slide_count: number; player_url: string }>(
      'POST', `/projects/${projectId}/compile`,
      beaconUrl ? { beacon_url: beaconUrl } : {});
  }

  getDeckStats(deckId: string) {
    return this.request<DeckStats>('GET', `/decks/${deckId}/stats`);
  }
}
