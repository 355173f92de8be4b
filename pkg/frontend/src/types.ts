/** Wire types for the /v1 annotation endpoints. */

export interface StructuralTag {
  pos: string;
  rel: string;
  cat: string;
}

export interface Repair {
  index: number;
  tag: [string, string, string];
  reason: string;
}

export interface SpanRequest {
  pos: string[];
  words?: string[];
  mode?: "span" | "sentence";
  source?: string;
}

export interface SpanResponse {
  tags: StructuralTag[];
  words: string[] | null;
  tree: string;
  repairs: Repair[];
  candidates: number[];
  unknown_tags: string[];
  mode: "span" | "sentence";
  score: number;
}

export interface ModelInfo {
  tagset: string[];
  labels: string[];
  features: number;
  iterations: number;
  sources: string[];
  mode: string;
}

export interface SaveRequest {
  tags: [string, string, string][];
  words?: string[];
}

export interface SaveResponse {
  appended: number;
  path: string;
}

/** Token of the sentence being annotated; word may be unknown. */
export interface Token {
  pos: string;
  word: string | null;
}
