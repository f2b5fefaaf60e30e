// The demo's result panels. One panel per task the service returned, except
// stats (counts + wordcloud) and sentiment (general + financial side by
// side), which each carry two of the classic eight.

import {
  AnalyzeResults,
  ExplainResult,
  PredictResult,
  SentimentResult,
  SentimentScore,
  StatsResult,
  SummaryResult,
  TaskError,
  TopicsAssignResult,
  isTaskError,
} from './types.js';
import { fmtCount, fmtNumber, fmtPercent, fmtSigned } from './format.js';
import { Child, h, VNode } from './vdom.js';

function panel(name: string, title: string, ...body: Child[]): VNode {
  return h('section', { class: 'panel', 'data-panel': name },
    h('h2', {}, title), ...body);
}

function errorChip(err: TaskError): VNode {
  return h('span', { class: 'chip error' }, err.error);
}

function barRow(label: string, fraction: number, value: string, negative = false): VNode {
  const width = Math.min(100, Math.max(0, fraction * 100));
  return h('div', { class: 'bar-row' },
    h('span', { class: 'bar-label', title: label }, label),
    h('span', { class: 'bar-track' },
      h('span', {
        class: negative ? 'bar-fill negative' : 'bar-fill',
        style: `left:0;width:${width.toFixed(1)}%`,
      })),
    h('span', { class: 'bar-value' }, value));
}

function countsPanel(stats: StatsResult): VNode {
  return panel('counts', 'Word and sentence count',
    h('div', { class: 'stat-row' },
      h('div', {},
        h('div', { class: 'big' }, fmtCount(stats.word_count)),
        h('div', { class: 'stat-name' }, 'words')),
      h('div', {},
        h('div', { class: 'big' }, fmtCount(stats.sentence_count)),
        h('div', { class: 'stat-name' }, 'sentences'))));
}

function wordcloudPanel(stats: StatsResult): VNode {
  const max = stats.top_terms.reduce((m, t) => Math.max(m, t.count), 1);
  return panel('wordcloud', 'Word cloud',
    h('div', { class: 'cloud' },
      stats.top_terms.map((t) =>
        h('span', {
          class: 'cloud-term',
          style: `font-size:${(12 + 18 * (t.count / max)).toFixed(1)}px`,
          title: `${t.term}: ${fmtCount(t.count)}`,
        }, t.term))));
}

function sentimentPanel(name: string, title: string, score: SentimentScore): VNode {
  const denom = Math.max(score.token_count, 1);
  return panel(name, title,
    h('div', { class: 'stat-row' },
      h('div', {},
        h('div', { class: 'big' }, fmtNumber(score.polarity)),
        h('div', { class: 'stat-name' }, 'polarity')),
      h('div', {},
        h('div', { class: 'big' }, fmtNumber(score.subjectivity)),
        h('div', { class: 'stat-name' }, 'subjectivity'))),
    h('div', {},
      Object.entries(score.category_counts).map(([category, count]) =>
        barRow(category.replace('_', ' '), count / denom, fmtCount(count)))));
}

function summaryPanel(summary: SummaryResult): VNode {
  return panel('summary', 'Summary',
    h('p', { class: 'summary-text' }, summary.text),
    h('div', { class: 'muted' },
      `${fmtCount(summary.selected.length)} of ${fmtCount(summary.scores.length)} sentences selected`));
}

function topicsPanel(assign: TopicsAssignResult): VNode {
  const max = assign.mixture.reduce((m, x) => Math.max(m, x), 0) || 1;
  return panel('topics', 'Topic mixture',
    h('div', {},
      assign.mixture.map((p, i) =>
        barRow(`Topic ${i + 1}`, p / max, fmtPercent(p)))));
}

function predictionPanel(pred: PredictResult): VNode {
  const labels: PredictResult['label'][] = ['lower', 'maintain', 'raise'];
  return panel('prediction', 'Rate decision',
    h('div', { class: `argmax ${pred.label}`, 'data-label': pred.label }, pred.label),
    h('div', {},
      pred.probs.map((p, i) => barRow(labels[i] ?? `class ${i}`, p, fmtPercent(p)))));
}

function explanationPanel(expl: ExplainResult): VNode {
  const maxAbs = expl.features.reduce((m, f) => Math.max(m, Math.abs(f.weight)), 0) || 1;
  return panel('explanation', 'Explanation',
    h('div', { class: 'muted' },
      h('span', { class: 'chip label' }, `class: ${expl.class}`),
      ` fit r² ${fmtNumber(expl.r2)}`),
    h('div', {},
      expl.features.map((f) =>
        barRow(f.token, Math.abs(f.weight) / maxAbs, fmtSigned(f.weight),
          f.weight < 0))),
    h('div', { class: 'sentence-strip' },
      expl.sentences.map((s) =>
        h('div', {
          class: 'sentence-chip',
          'data-intensity': s.intensity.toFixed(6),
          style: `background:rgba(26,95,180,${(0.85 * s.intensity).toFixed(4)})`,
        }, `Sentence ${s.index + 1}: ${fmtNumber(s.intensity, 2)}`))));
}

type PanelBuilder = (result: never) => VNode[];

// Task -> panels it contributes, preserving the classic eight-panel order.
const BUILDERS: [keyof AnalyzeResults, string[], PanelBuilder][] = [
  ['stats', ['counts', 'wordcloud'],
    (r: StatsResult) => [countsPanel(r), wordcloudPanel(r)]],
  ['sentiment', ['sentiment-general', 'sentiment-financial'],
    (r: SentimentResult) => [
      sentimentPanel('sentiment-general', 'General sentiment', r.generic),
      sentimentPanel('sentiment-financial', 'Financial sentiment', r.financial),
    ]],
  ['summary', ['summary'], (r: SummaryResult) => [summaryPanel(r)]],
  ['topics_assign', ['topics'], (r: TopicsAssignResult) => [topicsPanel(r)]],
  ['predict', ['prediction'], (r: PredictResult) => [predictionPanel(r)]],
  ['explain', ['explanation'], (r: ExplainResult) => [explanationPanel(r)]],
];

const TITLES: Record<string, string> = {
  counts: 'Word and sentence count',
  wordcloud: 'Word cloud',
  'sentiment-general': 'General sentiment',
  'sentiment-financial': 'Financial sentiment',
  summary: 'Summary',
  topics: 'Topic mixture',
  prediction: 'Rate decision',
  explanation: 'Explanation',
};

export function panelsFor(results: AnalyzeResults): VNode[] {
  const out: VNode[] = [];
  for (const [task, names, build] of BUILDERS) {
    const result = results[task];
    if (result === undefined) continue; // render exactly the returned tasks
    if (isTaskError(result)) {
      for (const name of names) {
        out.push(panel(name, TITLES[name] ?? name, errorChip(result)));
      }
    } else {
      out.push(...build(result as never));
    }
  }
  return out;
}
