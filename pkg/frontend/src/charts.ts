// SVG line charts without a charting dependency. Both landing charts take
// the same TimeScale instance, which is what keeps their time axes aligned.
// Axis labels show only data extremes so every printed number is a response
// value, not an interpolation.

import { fmtDate, fmtNumber } from './format.js';
import { h, VNode } from './vdom.js';

const WIDTH = 480;
const HEIGHT = 180;
const MARGIN = { top: 10, right: 12, bottom: 22, left: 46 };

const DAY_MS = 86_400_000;

export interface TimeScale {
  firstDate: string;
  lastDate: string;
  x(dateIso: string): number;
}

export function makeTimeScale(dates: string[]): TimeScale {
  const sorted = [...dates].sort();
  const first = sorted[0] ?? '';
  const last = sorted[sorted.length - 1] ?? '';
  const minDay = first ? Date.parse(first) / DAY_MS : 0;
  const maxDay = last ? Date.parse(last) / DAY_MS : 0;
  const span = maxDay - minDay;
  const inner = WIDTH - MARGIN.left - MARGIN.right;
  return {
    firstDate: first,
    lastDate: last,
    x(dateIso: string): number {
      if (span === 0) return MARGIN.left + inner / 2;
      const day = Date.parse(dateIso) / DAY_MS;
      return MARGIN.left + ((day - minDay) / span) * inner;
    },
  };
}

export interface ChartPoint {
  date: string;
  value: number;
  pointClass?: string;
}

export function lineChart(
  points: ChartPoint[],
  scale: TimeScale,
  valueDigits = 2,
): VNode {
  if (points.length === 0) {
    return h('svg', { class: 'chart', viewBox: `0 0 ${WIDTH} ${HEIGHT}` },
      h('text', {
        x: String(WIDTH / 2), y: String(HEIGHT / 2),
        class: 'tick-label', 'text-anchor': 'middle',
      }, 'no data'));
  }

  const values = points.map((p) => p.value);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const innerBottom = HEIGHT - MARGIN.bottom;
  const y = (v: number): number => {
    if (hi === lo) return (MARGIN.top + innerBottom) / 2;
    return innerBottom - ((v - lo) / (hi - lo)) * (innerBottom - MARGIN.top);
  };

  const ordered = [...points].sort((a, b) => (a.date < b.date ? -1 : 1));
  const path = ordered
    .map((p) => `${scale.x(p.date).toFixed(1)},${y(p.value).toFixed(1)}`)
    .join(' ');

  return h('svg', { class: 'chart', viewBox: `0 0 ${WIDTH} ${HEIGHT}` },
    h('line', {
      class: 'axis',
      x1: String(MARGIN.left), y1: String(innerBottom),
      x2: String(WIDTH - MARGIN.right), y2: String(innerBottom),
    }),
    h('line', {
      class: 'axis',
      x1: String(MARGIN.left), y1: String(MARGIN.top),
      x2: String(MARGIN.left), y2: String(innerBottom),
    }),
    h('polyline', { class: 'line', points: path }),
    ordered.map((p) =>
      h('circle', {
        class: `pt ${p.pointClass ?? ''}`.trim(),
        cx: scale.x(p.date).toFixed(1),
        cy: y(p.value).toFixed(1),
        r: '2.5',
      }, h('title', {}, `${fmtDate(p.date)}: ${fmtNumber(p.value, valueDigits)}`)),
    ),
    // Extreme-value labels only: axis text stays traceable to the data.
    h('text', {
      class: 'tick-label', x: String(MARGIN.left - 4), y: String(y(hi) + 3),
      'text-anchor': 'end',
    }, fmtNumber(hi, valueDigits)),
    h('text', {
      class: 'tick-label', x: String(MARGIN.left - 4), y: String(y(lo) + 3),
      'text-anchor': 'end',
    }, fmtNumber(lo, valueDigits)),
    h('text', {
      class: 'tick-label', x: String(MARGIN.left), y: String(HEIGHT - 6),
      'text-anchor': 'start',
    }, fmtDate(scale.firstDate)),
    h('text', {
      class: 'tick-label', x: String(WIDTH - MARGIN.right), y: String(HEIGHT - 6),
      'text-anchor': 'end',
    }, fmtDate(scale.lastDate)),
  );
}
