// Interactive demo view: paste text, run every analysis task, render the
// result panels. Pure view; the app layer owns submission and cancellation.

import { panelsFor } from './panels.js';
import { AnalyzeResponse } from './types.js';
import { h, Handler, VNode } from './vdom.js';

export interface DemoState {
  text: string;
  pending: boolean;
  response: AnalyzeResponse | null;
  error: string | null;
}

export interface DemoActions {
  onText(text: string): void;
  onSubmit(): void;
}

export function renderDemo(state: DemoState, actions: DemoActions): VNode {
  // Pending does not disable submit: a new submission is allowed to cancel
  // and supersede the one in flight.
  const submitDisabled = state.text.trim() === '';
  const oninput: Handler = (event) =>
    actions.onText((event.target as HTMLTextAreaElement).value);

  return h('div', { class: 'demo' },
    h('div', { class: 'demo-input' },
      h('textarea', {
        class: 'demo-text',
        placeholder: 'Paste a statement, speech, or minutes excerpt…',
        oninput,
      }, state.text),
      h('div', { class: 'actions' },
        h('button',
          submitDisabled
            ? { class: 'submit', disabled: '', onclick: actions.onSubmit }
            : { class: 'submit', onclick: actions.onSubmit },
          'Analyze'),
        state.pending ? h('span', { class: 'muted' }, 'analyzing…') : null)),
    state.error !== null
      ? h('div', { class: 'banner', role: 'alert' }, state.error)
      : null,
    state.response !== null
      ? h('div', { class: 'panels-grid' }, panelsFor(state.response.results))
      : null);
}
