/** Wire payload shapes spoken by the configuration server. */

export type NodeKind = "root" | "abstract" | "concrete";
export type EdgeKind = "all" | "not" | "any" | "one";
export type Action = "activate" | "deactivate";

export interface MarkerPayload {
  kind: string;
  atom: string;
  group: string | null;
}

export interface NodePayload {
  name: string;
  kind: NodeKind;
  parent: string | null;
  tags: string[];
  attributes: Record<string, string>;
  unsatisfiable: MarkerPayload[];
}

export interface EdgePayload {
  from: string;
  to: string;
  kind: EdgeKind;
  atom: string;
  group: string | null;
}

export interface FeatureModelPayload {
  method: "featureModel";
  ok: true;
  nodes: NodePayload[];
  dependencies: EdgePayload[];
  globals: Record<string, string>;
  active: string[];
}

export interface ProblemPayload {
  providers: string[];
  action: Action;
}

export type ProblemKind = "ALL" | "NOT" | "ANY" | "ONE";

export type ProblemsPayload = Record<string, Partial<Record<ProblemKind, Record<string, ProblemPayload>>>>;

export interface SuggestionPayload {
  feature: string;
  action: Action;
  atom: string;
}

export interface ValidatePayload {
  method: "validate";
  ok: true;
  valid: boolean;
  problems: ProblemsPayload;
  suggestions: SuggestionPayload[];
}

export interface ActivatePayload {
  method: "activate";
  ok: true;
  active: string[];
}

export interface UpdateAttributePayload {
  method: "updateAttribute";
  ok: true;
  added: EdgePayload[];
  removed: EdgePayload[];
}

export interface CommitPayload {
  method: "commit";
  ok: true;
  active: string[];
  locals: Record<string, Record<string, string>>;
  globals: Record<string, string>;
}

export interface ErrorPayload {
  method: string | null;
  ok: false;
  error: string;
  message: string;
}

export type ResponsePayload =
  | FeatureModelPayload
  | ValidatePayload
  | ActivatePayload
  | UpdateAttributePayload
  | CommitPayload
  | ErrorPayload;

export interface RequestEnvelope {
  method: string;
  [key: string]: unknown;
}
