// Thin typed client over the service routes. Every page talks to the API
// through this module so tests can assert the exact URLs it builds.

import {
  AnalyzeResponse,
  AuthorRow,
  DocumentFilters,
  DocumentRow,
  FfrSeries,
  Health,
  SentimentSeries,
  TaskName,
  TopicsPayload,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function getJson<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (err) {
    if (err instanceof DOMException && err.name === 'AbortError') throw err;
    throw new ApiError(0, 'service unreachable');
  }
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const detail =
      typeof body === 'object' && body !== null && 'error' in body
        ? String((body as { error: unknown }).error)
        : `request failed (${response.status})`;
    throw new ApiError(response.status, detail);
  }
  return body as T;
}

export function documentsUrl(filters: DocumentFilters = {}): string {
  const params = new URLSearchParams();
  if (filters.author) params.set('author', filters.author);
  if (filters.category) params.set('category', filters.category);
  if (filters.from) params.set('from', filters.from);
  if (filters.to) params.set('to', filters.to);
  const query = params.toString();
  return query ? `/api/documents?${query}` : '/api/documents';
}

export const api = {
  health: () => getJson<Health>('/api/health'),
  authors: () => getJson<AuthorRow[]>('/api/authors'),
  documents: (filters: DocumentFilters = {}) =>
    getJson<DocumentRow[]>(documentsUrl(filters)),
  ffr: () => getJson<FfrSeries>('/api/ffr'),
  sentimentSeries: (author: string) =>
    getJson<SentimentSeries>(
      `/api/sentiment-series?${new URLSearchParams({ author })}`,
    ),
  topics: () => getJson<TopicsPayload>('/api/topics'),
  analyze: (text: string, tasks: TaskName[], signal?: AbortSignal) =>
    getJson<AnalyzeResponse>('/api/nlp/analyze', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ text, tasks }),
      signal,
    }),
};
