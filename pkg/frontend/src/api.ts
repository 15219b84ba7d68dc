/** Thin typed client for the portal HTTP API. All mutation calls live here so
 * the edit-mode guard has a single chokepoint.
 */

import type { MapConfig, Resource, ResourceEntry } from './types.js';

export class ApiError extends Error {
  constructor(
    public httpStatus: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function unwrap<T>(resp: Response): Promise<T> {
  if (resp.ok) {
    if (resp.status === 204) {
      return undefined as T;
    }
    return (await resp.json()) as T;
  }
  let code = 'http_error';
  let message = `${resp.status}`;
  try {
    const body = await resp.json();
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, code, message);
}

export class Api {
  constructor(
    private base: string = '',
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, init);
    return unwrap<T>(resp);
  }

  listResources(signal?: AbortSignal): Promise<ResourceEntry[]> {
    return this.request('/api/resources', { signal });
  }

  search(keyword: string, signal?: AbortSignal): Promise<string[]> {
    return this.request(`/api/search?q=${encodeURIComponent(keyword)}`, { signal });
  }

  async popupHtml(id: string, signal?: AbortSignal): Promise<string> {
    const resp = await this.fetchFn(
      `${this.base}/api/resources/${encodeURIComponent(id)}/popup`,
      { signal },
    );
    if (!resp.ok) {
      await unwrap(resp);
    }
    return resp.text();
  }

  getMapConfig(): Promise<MapConfig> {
    return this.request('/api/map-config');
  }

  putMapConfig(patch: Partial<MapConfig>): Promise<MapConfig> {
    return this.request('/api/map-config', {
      method: 'PUT',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(patch),
    });
  }

  createResource(hostname: string): Promise<Resource> {
    return this.request('/api/resources', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ hostname }),
    });
  }

  updateResource(id: string, patch: Record<string, unknown>): Promise<Resource> {
    return this.request(`/api/resources/${encodeURIComponent(id)}`, {
      method: 'PUT',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(patch),
    });
  }

  deleteResource(id: string): Promise<void> {
    return this.request(`/api/resources/${encodeURIComponent(id)}`, {
      method: 'DELETE',
    });
  }
}
