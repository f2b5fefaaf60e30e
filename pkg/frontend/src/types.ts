// Response shapes of the fednlp HTTP API. The client renders these verbatim;
// it never derives new numbers from text.

export interface Health {
  status: string;
  model_version: number | null;
}

export interface AuthorRow {
  name: string;
  doc_count: number;
}

export type Category = 'speech' | 'minutes' | 'transcript' | 'press_release';

export interface DocumentRow {
  id: string;
  title: string;
  author: string;
  category: Category;
  date: string;
  word_count: number;
  financial_polarity: number;
}

export interface DocumentFilters {
  author?: string;
  category?: Category;
  from?: string;
  to?: string;
}

export interface FfrPoint {
  date: string;
  lower_bound: number;
  decision: 'lower' | 'maintain' | 'raise';
}

export interface FfrSeries {
  points: FfrPoint[];
}

export interface SentimentPoint {
  date: string;
  polarity: number;
}

export interface SentimentSeries {
  author: string;
  points: SentimentPoint[];
}

export interface TopicTerm {
  term: string;
  p: number;
}

export interface Topic {
  id: number;
  terms: TopicTerm[];
}

export interface TopicsPayload {
  k: number;
  topics: Topic[];
  doc_topics: { doc_id: string; mixture: number[] }[];
}

// --- analyze ---------------------------------------------------------------

export type TaskName =
  | 'stats'
  | 'sentiment'
  | 'summary'
  | 'topics_assign'
  | 'predict'
  | 'explain';

export interface TaskError {
  error: string;
}

export interface StatsResult {
  word_count: number;
  sentence_count: number;
  top_terms: { term: string; count: number }[];
}

export interface SentimentScore {
  polarity: number;
  subjectivity: number;
  category_counts: Record<string, number>;
  token_count: number;
}

export interface SentimentResult {
  generic: SentimentScore;
  financial: SentimentScore;
}

export interface SummaryResult {
  selected: number[];
  text: string;
  scores: number[];
}

export interface TopicsAssignResult {
  mixture: number[];
}

export interface PredictResult {
  probs: number[];
  label: 'lower' | 'maintain' | 'raise';
}

export interface ExplainResult {
  class: string;
  intercept: number;
  r2: number;
  features: { token: string; weight: number }[];
  sentences: { index: number; intensity: number }[];
}

export interface AnalyzeResults {
  stats?: StatsResult | TaskError;
  sentiment?: SentimentResult | TaskError;
  summary?: SummaryResult | TaskError;
  topics_assign?: TopicsAssignResult | TaskError;
  predict?: PredictResult | TaskError;
  explain?: ExplainResult | TaskError;
}

export interface AnalyzeResponse {
  results: AnalyzeResults;
  timing_ms: Record<string, number>;
}

export function isTaskError(value: unknown): value is TaskError {
  return (
    typeof value === 'object' &&
    value !== null &&
    'error' in (value as Record<string, unknown>)
  );
}
