// Wire types for the explanation service (see ../docs/api.md).

export interface FeatureInfo {
  name: string;
  kind: 'categorical' | 'continuous';
  mutable: boolean;
  levels?: string[];
  min?: number;
  max?: number;
  weight?: number;
}

export interface ModelInfo {
  schema_hash: string;
  label_column: string;
  class_labels: { negative: string; positive: string };
  decision_boundary: number;
  features: FeatureInfo[];
}

export type InstanceMap = Record<string, string | number>;

export interface Prediction {
  probability: number;
  predicted_class: string;
  confidence: number;
}

export interface Change {
  feature: string;
  old: string | number;
  new: string | number;
}

export interface CfResult {
  instance: InstanceMap;
  cost: number;
  probability: number;
  confidence: number;
  predicted_class: string;
  changes: Change[];
  sentence: string;
}

export interface CfResponse {
  results: CfResult[];
  reason: string | null;
  complete: boolean;
}

export type Direction = 'raise' | 'lower';

export interface CfRequest {
  instance: InstanceMap;
  direction: Direction;
  threshold: number;
  alternatives?: number;
}

export interface GridConfig {
  min: number;
  max: number;
  step: number;
}

export interface IcePointData {
  value: string | number;
  probability: number;
  confidence: number;
  same_class: boolean;
}

export interface IceCurveData {
  feature: string;
  prediction_class: string;
  kind: string;
  origin_index: number | null;
  points: IcePointData[];
}

export interface IceResponse {
  curves: IceCurveData[];
}
