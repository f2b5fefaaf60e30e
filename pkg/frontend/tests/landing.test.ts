// Contract tests for the landing view against recorded service responses.

import { describe, expect, it } from 'vitest';

import { renderLanding, LandingActions, LandingData, LandingState } from '../src/landing.js';
import { fmtCount, fmtDate, fmtNumber } from '../src/format.js';
import {
  AuthorRow,
  DocumentRow,
  FfrSeries,
  SentimentSeries,
  TopicsPayload,
} from '../src/types.js';
import { byClass, findAll, textOf, VNode } from '../src/vdom.js';

import author3DocsJson from './fixtures/author3_documents.json';
import author3SeriesJson from './fixtures/author3_series.json';
import authorsJson from './fixtures/authors.json';
import documentsJson from './fixtures/documents.json';
import speechDocsJson from './fixtures/documents_speech.json';
import ffrJson from './fixtures/ffr.json';
import sentimentSeriesJson from './fixtures/sentiment_series.json';
import topicsJson from './fixtures/topics.json';

const author3Docs = author3DocsJson as DocumentRow[];
const author3Series = author3SeriesJson as SentimentSeries;
const authors = authorsJson as AuthorRow[];
const documents = documentsJson as DocumentRow[];
const speechDocs = speechDocsJson as DocumentRow[];
const ffr = ffrJson as FfrSeries;
const sentimentSeries = sentimentSeriesJson as SentimentSeries;
const topics = topicsJson as unknown as TopicsPayload;

function state(over: Partial<LandingState> = {}): LandingState {
  return {
    author: 'Alvarez', category: '', from: '', to: '',
    loading: false, error: null, ...over,
  };
}

function data(over: Partial<LandingData> = {}): LandingData {
  return {
    authors, documents, sentiment: sentimentSeries, ffr, topics, ...over,
  };
}

function noop(): LandingActions {
  return {
    onAuthor: () => {}, onCategory: () => {}, onFrom: () => {},
    onTo: () => {}, onRetry: () => {},
  };
}

function chartPanel(view: VNode, name: string): VNode {
  const hit = findAll(view, (n) => n.attrs['data-panel'] === name)[0];
  if (!hit) throw new Error(`no panel ${name}`);
  return hit;
}

describe('document list', () => {
  it('an author with 3 documents gets 3 rows and 3 sentiment points', () => {
    const view = renderLanding(
      state(), data({ documents: author3Docs, sentiment: author3Series }), noop());
    expect(byClass(view, 'doc-row')).toHaveLength(3);
    const chart = chartPanel(view, 'sentiment-chart');
    expect(findAll(chart, (n) => n.tag === 'circle')).toHaveLength(3);
  });

  it('every cell comes from a response field via the shared formatters', () => {
    const view = renderLanding(state(), data({ documents: author3Docs }), noop());
    const rows = byClass(view, 'doc-row');
    expect(rows).toHaveLength(author3Docs.length);
    author3Docs.forEach((doc, i) => {
      expect(rows[i].attrs['data-id']).toBe(doc.id);
      const cells = rows[i].children.map(textOf);
      expect(cells).toEqual([
        fmtDate(doc.date),
        doc.title,
        doc.category,
        fmtCount(doc.word_count),
        fmtNumber(doc.financial_polarity),
      ]);
    });
  });

  it('renders the service-filtered rows as sent', () => {
    // Client passes the category filter through; it never re-filters.
    const view = renderLanding(
      state({ category: 'speech' }), data({ documents: speechDocs }), noop());
    const rows = byClass(view, 'doc-row');
    expect(rows.map((r) => textOf(r.children[2]))).toEqual(
      speechDocs.map((d) => d.category));
    expect(textOf(chartPanel(view, 'documents').children[0]))
      .toBe(`Documents (${fmtCount(speechDocs.length)})`);
  });
});

describe('error banner', () => {
  it('service failure renders a banner with a retry control, never a blank page', () => {
    let retried = 0;
    const actions = { ...noop(), onRetry: () => { retried += 1; } };
    const view = renderLanding(
      state({ error: 'service unreachable' }),
      data({ documents: [], sentiment: null, ffr: null, topics: null }),
      actions);
    const banners = byClass(view, 'banner');
    expect(banners).toHaveLength(1);
    expect(textOf(banners[0])).toContain('service unreachable');
    const retry = byClass(banners[0], 'retry')[0];
    const handler = retry.attrs['onclick'];
    expect(typeof handler).toBe('function');
    (handler as (e: unknown) => void)({});
    expect(retried).toBe(1);
    // Controls and (empty) charts are still on the page.
    expect(byClass(view, 'controls')).toHaveLength(1);
    expect(textOf(chartPanel(view, 'sentiment-chart'))).toContain('no data');
  });

  it('no banner without an error', () => {
    const view = renderLanding(state(), data(), noop());
    expect(byClass(view, 'banner')).toHaveLength(0);
  });
});

describe('shared time axis', () => {
  function axisDates(chart: VNode): [string, string] {
    const labels = byClass(chart, 'tick-label').map(textOf);
    // Last two tick labels are the first/last axis dates.
    return [labels[labels.length - 2], labels[labels.length - 1]];
  }

  it('both charts label the same first and last date', () => {
    const view = renderLanding(state(), data(), noop());
    const sentimentAxis = axisDates(chartPanel(view, 'sentiment-chart'));
    const ffrAxis = axisDates(chartPanel(view, 'ffr-chart'));
    expect(sentimentAxis).toEqual(ffrAxis);
    // The union of both series spans further than the sentiment series alone.
    const allDates = [
      ...sentimentSeries.points.map((p) => p.date),
      ...ffr.points.map((p) => p.date),
    ].sort();
    expect(sentimentAxis).toEqual([allDates[0], allDates[allDates.length - 1]]);
    expect(sentimentSeries.points.map((p) => p.date).sort()[0])
      .not.toBe(allDates[0]);
  });

  it('FFR points carry their decision as a class', () => {
    const view = renderLanding(state(), data(), noop());
    const points = findAll(chartPanel(view, 'ffr-chart'), (n) => n.tag === 'circle');
    expect(points).toHaveLength(ffr.points.length);
    points.forEach((pt, i) => {
      expect(String(pt.attrs['class']).split(' ')).toContain(ffr.points[i].decision);
    });
  });
});

describe('topics view', () => {
  it('shows every topic with at most 8 terms, probabilities as titles', () => {
    const view = renderLanding(state(), data(), noop());
    const topicBlocks = byClass(chartPanel(view, 'topics-view'), 'topic');
    expect(topicBlocks).toHaveLength(topics.k);
    topicBlocks.forEach((block, i) => {
      expect(textOf(byClass(block, 'topic-name')[0])).toBe(`Topic ${i + 1}`);
      const chips = byClass(block, 'term-chip');
      expect(chips).toHaveLength(Math.min(8, topics.topics[i].terms.length));
      chips.forEach((chip, j) => {
        const term = topics.topics[i].terms[j];
        expect(textOf(chip)).toBe(term.term);
        expect(chip.attrs['title']).toBe(fmtNumber(term.p, 4));
      });
    });
  });

  it('degrades to a note when no topic model is loaded', () => {
    const view = renderLanding(state(), data({ topics: null }), noop());
    expect(textOf(chartPanel(view, 'topics-view'))).toContain('no topic model loaded');
  });
});

describe('controls', () => {
  it('author options show name and document count from the response', () => {
    const view = renderLanding(state({ author: 'Brennan' }), data(), noop());
    const select = byClass(view, 'author-select')[0];
    const options = select.children as VNode[];
    expect(options.map(textOf)).toEqual(
      authors.map((a) => `${a.name} (${fmtCount(a.doc_count)})`));
    const selected = options.filter((o) => o.attrs['selected'] !== undefined);
    expect(selected).toHaveLength(1);
    expect(selected[0].attrs['value']).toBe('Brennan');
  });

  it('category select covers all categories plus an "all" default', () => {
    const view = renderLanding(state(), data(), noop());
    const select = byClass(view, 'category-select')[0];
    const values = (select.children as VNode[]).map((o) => o.attrs['value']);
    expect(values).toEqual(['', 'speech', 'minutes', 'transcript', 'press_release']);
  });

  it('date inputs reflect the filter state', () => {
    const view = renderLanding(
      state({ from: '2015-02-01', to: '2015-03-01' }), data(), noop());
    expect(byClass(view, 'from-input')[0].attrs['value']).toBe('2015-02-01');
    expect(byClass(view, 'to-input')[0].attrs['value']).toBe('2015-03-01');
  });

  it('loading state is visible while fetches are in flight', () => {
    const view = renderLanding(state({ loading: true }), data(), noop());
    expect(byClass(view, 'loading')).toHaveLength(1);
  });
});
