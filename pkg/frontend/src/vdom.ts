// Minimal virtual nodes: render functions build plain trees that tests can
// walk without a browser, and the mount layer turns them into real DOM.

export type Handler = (event: Event) => void;

export interface VNode {
  tag: string;
  attrs: Record<string, string | Handler>;
  children: Child[];
}

export type Child = VNode | string;

export function h(
  tag: string,
  attrs: Record<string, string | Handler> = {},
  ...children: (Child | Child[] | null | undefined)[]
): VNode {
  const flat: Child[] = [];
  for (const child of children) {
    if (child === null || child === undefined) continue;
    if (Array.isArray(child)) flat.push(...child);
    else flat.push(child);
  }
  return { tag, attrs, children: flat };
}

const SVG_TAGS = new Set([
  'svg', 'line', 'polyline', 'path', 'circle', 'rect', 'g', 'text', 'title',
]);

export function toDom(node: Child): globalThis.Node {
  if (typeof node === 'string') return document.createTextNode(node);
  const el = SVG_TAGS.has(node.tag)
    ? document.createElementNS('http://www.w3.org/2000/svg', node.tag)
    : document.createElement(node.tag);
  for (const [name, value] of Object.entries(node.attrs)) {
    if (typeof value === 'function') {
      el.addEventListener(name.replace(/^on/, ''), value);
    } else {
      el.setAttribute(name, value);
    }
  }
  for (const child of node.children) el.appendChild(toDom(child));
  return el;
}

export function mount(root: Element, node: VNode): void {
  root.replaceChildren(toDom(node));
}

// --- tree queries (used by the app and by the contract tests) ---------------

export function findAll(
  node: Child,
  predicate: (n: VNode) => boolean,
): VNode[] {
  if (typeof node === 'string') return [];
  const hits: VNode[] = [];
  if (predicate(node)) hits.push(node);
  for (const child of node.children) hits.push(...findAll(child, predicate));
  return hits;
}

export function byClass(node: Child, className: string): VNode[] {
  return findAll(node, (n) => {
    const cls = n.attrs['class'];
    return typeof cls === 'string' && cls.split(/\s+/).includes(className);
  });
}

export function textOf(node: Child): string {
  if (typeof node === 'string') return node;
  return node.children.map(textOf).join('');
}
