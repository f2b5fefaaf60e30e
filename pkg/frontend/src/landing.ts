// Per-author landing view: sentiment and target-rate charts on one time
// axis, the fitted topics, and the filterable document list.

import { lineChart, makeTimeScale } from './charts.js';
import { fmtCount, fmtDate, fmtNumber } from './format.js';
import {
  AuthorRow,
  Category,
  DocumentRow,
  FfrSeries,
  SentimentSeries,
  TopicsPayload,
} from './types.js';
import { Child, h, Handler, VNode } from './vdom.js';

export interface LandingState {
  author: string | null;
  category: '' | Category;
  from: string;
  to: string;
  loading: boolean;
  error: string | null;
}

export interface LandingData {
  authors: AuthorRow[];
  documents: DocumentRow[];
  sentiment: SentimentSeries | null;
  ffr: FfrSeries | null;
  topics: TopicsPayload | null;
}

export interface LandingActions {
  onAuthor(author: string): void;
  onCategory(category: string): void;
  onFrom(date: string): void;
  onTo(date: string): void;
  onRetry(): void;
}

const CATEGORIES: Category[] = ['speech', 'minutes', 'transcript', 'press_release'];
const TERMS_SHOWN = 8;

function selectValue(handler: (value: string) => void): Handler {
  return (event) => handler((event.target as HTMLSelectElement).value);
}

function banner(message: string, onRetry: Handler): VNode {
  return h('div', { class: 'banner', role: 'alert' },
    h('span', {}, message),
    h('button', { class: 'retry', onclick: onRetry }, 'Retry'));
}

function controls(state: LandingState, data: LandingData, actions: LandingActions): VNode {
  return h('div', { class: 'controls' },
    h('label', {}, 'Author',
      h('select', { class: 'author-select', onchange: selectValue(actions.onAuthor) },
        data.authors.map((a) =>
          h('option',
            a.name === state.author
              ? { value: a.name, selected: '' }
              : { value: a.name },
            `${a.name} (${fmtCount(a.doc_count)})`)))),
    h('label', {}, 'Category',
      h('select', { class: 'category-select', onchange: selectValue(actions.onCategory) },
        h('option', { value: '' }, 'all'),
        CATEGORIES.map((c) =>
          h('option',
            c === state.category ? { value: c, selected: '' } : { value: c },
            c)))),
    h('label', {}, 'From',
      h('input', {
        class: 'from-input', type: 'date', value: state.from,
        onchange: selectValue(actions.onFrom),
      })),
    h('label', {}, 'To',
      h('input', {
        class: 'to-input', type: 'date', value: state.to,
        onchange: selectValue(actions.onTo),
      })));
}

function chartsRow(data: LandingData): VNode {
  const sentimentPoints = data.sentiment?.points ?? [];
  const ffrPoints = data.ffr?.points ?? [];
  // One scale across both charts: the shared time axis.
  const scale = makeTimeScale([
    ...sentimentPoints.map((p) => p.date),
    ...ffrPoints.map((p) => p.date),
  ]);
  return h('div', { class: 'charts-row' },
    h('section', { class: 'panel', 'data-panel': 'sentiment-chart' },
      h('h2', {}, 'Financial sentiment over time'),
      lineChart(
        sentimentPoints.map((p) => ({ date: p.date, value: p.polarity })),
        scale, 2)),
    h('section', { class: 'panel', 'data-panel': 'ffr-chart' },
      h('h2', {}, 'Target rate, lower bound'),
      lineChart(
        ffrPoints.map((p) => ({
          date: p.date, value: p.lower_bound, pointClass: p.decision,
        })),
        scale, 2)));
}

function topicsView(topics: TopicsPayload | null): VNode {
  if (topics === null) {
    return h('section', { class: 'panel', 'data-panel': 'topics-view' },
      h('h2', {}, 'Topics'),
      h('div', { class: 'muted' }, 'no topic model loaded'));
  }
  return h('section', { class: 'panel', 'data-panel': 'topics-view' },
    h('h2', {}, 'Topics'),
    topics.topics.map((topic) =>
      h('div', { class: 'topic' },
        h('span', { class: 'topic-name' }, `Topic ${topic.id + 1}`),
        topic.terms.slice(0, TERMS_SHOWN).map((t) =>
          h('span', { class: 'term-chip', title: fmtNumber(t.p, 4) }, t.term)))));
}

function documentList(documents: DocumentRow[]): VNode {
  const rows: Child[] = documents.map((d) =>
    h('tr', { class: 'doc-row', 'data-id': d.id },
      h('td', {}, fmtDate(d.date)),
      h('td', {}, d.title),
      h('td', {}, d.category),
      h('td', {}, fmtCount(d.word_count)),
      h('td', {}, fmtNumber(d.financial_polarity))));
  return h('section', { class: 'panel', 'data-panel': 'documents' },
    h('h2', {}, `Documents (${fmtCount(documents.length)})`),
    h('table', { class: 'doc-list' },
      h('thead', {},
        h('tr', {},
          h('th', {}, 'Date'), h('th', {}, 'Title'), h('th', {}, 'Category'),
          h('th', {}, 'Words'), h('th', {}, 'Fin. polarity'))),
      h('tbody', {}, rows)));
}

export function renderLanding(
  state: LandingState,
  data: LandingData,
  actions: LandingActions,
): VNode {
  return h('div', { class: 'landing' },
    state.error !== null
      ? banner(state.error, actions.onRetry)
      : null,
    controls(state, data, actions),
    state.loading ? h('div', { class: 'muted loading' }, 'loading…') : null,
    chartsRow(data),
    h('div', { class: 'charts-row' },
      topicsView(data.topics),
      documentList(data.documents)));
}
