// JSON shapes mirrored from the HTTP API; the UI adds no domain types of
// its own, only view state.

export interface TreeNode {
  node_id: string;
  label: string;
  basis: string;
  children: TreeNode[];
  primitive_ids: string[];
}

export interface TreeResponse {
  version: number;
  doc_id: string;
  root: TreeNode;
}

export interface Unit {
  unit_id: string;
  name: string;
  primitive_ids: string[];
  source_node: string;
}

export interface ChannelSpec {
  channel: string;
  distinct_values: number;
  salience_rank: number;
  complexity_score: number;
  enabled: boolean;
}

export interface ChannelPlan {
  version?: number;
  unit_id: string;
  channels: ChannelSpec[];
  orphaned_slides?: string[];
}

export type RelationKind = 'dependent' | 'independent' | 'none';

export interface GraphEdge {
  from: string;
  to: string;
  kind: 'dependent' | 'independent';
}

export interface RelationGraph {
  version: number;
  units: string[];
  edges: GraphEdge[];
}

export interface SequenceInfo {
  order: string[];
  provenance: string;
}

export interface SequenceResponse {
  version: number;
  suggested: SequenceInfo;
  stored: SequenceInfo | null;
}

export interface Violation {
  from: string;
  to: string;
}

export interface StepJson {
  step_id: string;
  kind: 'transition' | 'annotation' | 'question';
  [key: string]: unknown;
}

export interface SlideJson {
  slide_id: string;
  unit_id: string | null;
  channel_tags: string[];
  notes: string;
  steps: StepJson[];
}

export interface DeckJson {
  deck_id: string;
  title: string;
  slides: SlideJson[];
  units: Unit[];
  sequence: SequenceInfo;
  overview_slide: boolean;
}

export interface SlideStatsRow {
  slide_id: string;
  pass_means_s: number[];
}

export interface QuestionStats {
  answers: number;
  correct: number;
  accuracy: number;
}

export interface CommentEntry {
  student_token: string;
  text: string;
  timestamp_ms: number;
  slide_id?: string | null;
}

export interface DeckStats {
  per_slide: SlideStatsRow[];
  per_student: Record<string, Array<[number, number]>>;
  per_question: Record<string, QuestionStats>;
  comments: CommentEntry[];
  quality?: Record<string, number>;
}
