// Application shell: hash routing, state, data loading, and the
// one-in-flight-analyze rule. Views stay pure; all effects live here.

import { api, ApiError } from './api.js';
import { DemoState, renderDemo } from './demo.js';
import {
  LandingData,
  LandingState,
  renderLanding,
} from './landing.js';
import { TaskName } from './types.js';
import { h, mount, VNode } from './vdom.js';

export type Route =
  | { page: 'landing'; author: string | null }
  | { page: 'demo' };

export function parseHash(hash: string): Route {
  if (hash === '#/demo') return { page: 'demo' };
  const match = /^#\/author\/(.+)$/.exec(hash);
  if (match) return { page: 'landing', author: decodeURIComponent(match[1]) };
  return { page: 'landing', author: null };
}

export function authorHash(author: string): string {
  return `#/author/${encodeURIComponent(author)}`;
}

const ALL_TASKS: TaskName[] = [
  'stats', 'sentiment', 'summary', 'topics_assign', 'predict', 'explain',
];

export class App {
  private landing: LandingState = {
    author: null, category: '', from: '', to: '', loading: false, error: null,
  };

  private data: LandingData = {
    authors: [], documents: [], sentiment: null, ffr: null, topics: null,
  };

  private demo: DemoState = {
    text: '', pending: false, response: null, error: null,
  };

  private inflight: AbortController | null = null;
  private route: Route = { page: 'landing', author: null };

  constructor(private readonly root: Element) {}

  start(): void {
    window.addEventListener('hashchange', () => this.onRoute());
    this.onRoute();
  }

  private onRoute(): void {
    this.route = parseHash(window.location.hash);
    if (this.route.page === 'landing') {
      this.landing.author = this.route.author ?? this.landing.author;
      void this.loadLanding();
    }
    this.render();
  }

  private async loadLanding(): Promise<void> {
    this.landing.loading = true;
    this.landing.error = null;
    this.render();
    try {
      if (this.data.authors.length === 0) {
        this.data.authors = await api.authors();
      }
      if (this.landing.author === null) {
        this.landing.author = this.data.authors[0]?.name ?? null;
      }
      const author = this.landing.author;
      const [documents, sentiment, ffr, topics] = await Promise.all([
        api.documents({
          author: author ?? undefined,
          category: this.landing.category || undefined,
          from: this.landing.from || undefined,
          to: this.landing.to || undefined,
        }),
        author !== null ? api.sentimentSeries(author) : Promise.resolve(null),
        api.ffr(),
        // A service without a topic model 404s; that is absence, not failure.
        api.topics().catch((err) => {
          if (err instanceof ApiError && err.status === 404) return null;
          throw err;
        }),
      ]);
      this.data = { ...this.data, documents, sentiment, ffr, topics };
    } catch (err) {
      this.landing.error =
        err instanceof ApiError ? err.message : 'service unreachable';
    } finally {
      this.landing.loading = false;
      this.render();
    }
  }

  private submitAnalyze(): void {
    const text = this.demo.text;
    if (text.trim() === '') return;
    // New submission supersedes whatever is still running.
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.demo.response = null; // stale results never linger
    this.demo.error = null;
    this.demo.pending = true;
    this.render();
    api.analyze(text, ALL_TASKS, controller.signal)
      .then((response) => {
        if (controller.signal.aborted) return;
        this.demo.response = response;
      })
      .catch((err) => {
        if (controller.signal.aborted) return;
        this.demo.error =
          err instanceof ApiError ? err.message : 'service unreachable';
      })
      .finally(() => {
        if (this.inflight === controller) this.inflight = null;
        if (!controller.signal.aborted) {
          this.demo.pending = false;
          this.render();
        }
      });
  }

  private syncSubmitDisabled(): void {
    const button = this.root.querySelector('button.submit');
    if (button instanceof HTMLButtonElement) {
      button.disabled = this.demo.text.trim() === '';
    }
  }

  private view(): VNode {
    const isDemo = this.route.page === 'demo';
    const header = h('header', { class: 'topbar' },
      h('h1', {}, 'fednlp'),
      h('a', { href: '#/', class: isDemo ? '' : 'active' }, 'Landing'),
      h('a', { href: '#/demo', class: isDemo ? 'active' : '' }, 'Demo'));

    const body = isDemo
      ? renderDemo(this.demo, {
          onText: (text) => {
            this.demo.text = text;
            // A full re-render would replace the textarea mid-keystroke and
            // drop focus; only the button's enablement can change here.
            this.syncSubmitDisabled();
          },
          onSubmit: () => this.submitAnalyze(),
        })
      : renderLanding(this.landing, this.data, {
          onAuthor: (author) => {
            window.location.hash = authorHash(author);
          },
          onCategory: (category) => {
            this.landing.category = category as LandingState['category'];
            void this.loadLanding();
          },
          onFrom: (date) => {
            this.landing.from = date;
            void this.loadLanding();
          },
          onTo: (date) => {
            this.landing.to = date;
            void this.loadLanding();
          },
          onRetry: () => void this.loadLanding(),
        });

    return h('div', {}, header, h('main', {}, body));
  }

  private render(): void {
    mount(this.root, this.view());
  }
}
