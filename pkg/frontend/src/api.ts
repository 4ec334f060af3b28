import type {
  CfRequest,
  CfResponse,
  GridConfig,
  IceResponse,
  InstanceMap,
  ModelInfo,
  Prediction,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: unknown,
  ) {
    super(`service answered ${status}`);
  }
}

/** Thin typed client; the UI never recomputes what the service returns. */
export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      throw new ApiError(response.status, body);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown, signal?: AbortSignal): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(payload),
      signal,
    });
  }

  getModel(): Promise<ModelInfo> {
    return this.request<ModelInfo>('/model');
  }

  predict(instance: InstanceMap, signal?: AbortSignal): Promise<Prediction> {
    return this.post<Prediction>('/predict', { instance }, signal);
  }

  counterfactuals(body: CfRequest, signal?: AbortSignal): Promise<CfResponse> {
    return this.post<CfResponse>('/counterfactuals', body, signal);
  }

  ice(
    instance: InstanceMap,
    features: string[],
    grid?: Record<string, GridConfig>,
    signal?: AbortSignal,
  ): Promise<IceResponse> {
    return this.post<IceResponse>('/ice', { instance, features, grid }, signal);
  }
}
