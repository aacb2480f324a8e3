/**
 * Hover runtime for generated ownership-timeline documents.
 *
 * Binds every element carrying a data-hover attribute: pointing at one
 * shows its message in a shared tooltip near the cursor and highlights all
 * code tokens that share the element's data-hash; pointing away removes
 * both. Panels may be inline SVG or same-origin <object class="ownviz-panel">
 * embeds (cross-highlighting then works across panel documents).
 *
 * Loaded once per page as a module script; importing it attaches to the
 * current document automatically. Explicit attach_handlers calls are
 * idempotent per element.
 */

export interface HoverBinding {
  target: Element;
  hash: number;
  message: string;
}

const TOOLTIP_CLASS = "ownviz-tooltip";
const HIGHLIGHT_CLASS = "ownviz-highlight";
const BOUND_FLAG = "data-ownviz-bound";
const CURSOR_GAP = 12;
const EDGE_PAD = 8;

// Injected here (not in the SVGs) so themes can override both rules.
const RUNTIME_CSS = `
.${TOOLTIP_CLASS} {
  position: fixed;
  z-index: 9999;
  max-width: 320px;
  padding: 4px 8px;
  border-radius: 4px;
  background: #2b2b2b;
  color: #f5f5f5;
  font: 12px/1.45 system-ui, sans-serif;
  white-space: pre-line;
  pointer-events: none;
  visibility: hidden;
}
.${HIGHLIGHT_CLASS} {
  fill: #ffffff;
  stroke: none;
  paint-order: stroke;
  font-weight: bold;
  text-decoration: underline;
}
`;

interface PanelScope {
  documents: ParentNode[];
  hostOf: Map<ParentNode, Element | null>;
}

const activeHighlights: Element[] = [];

function collectScope(root: ParentNode): PanelScope {
  const documents: ParentNode[] = [root];
  const hostOf = new Map<ParentNode, Element | null>([[root, null]]);
  for (const object of root.querySelectorAll<HTMLObjectElement>("object.ownviz-panel")) {
    const inner = object.contentDocument;
    if (inner && !hostOf.has(inner)) {
      documents.push(inner);
      hostOf.set(inner, object);
    }
  }
  return { documents, hostOf };
}

function hostDocument(root: ParentNode): Document {
  return root instanceof Document ? root : root.ownerDocument ?? document;
}

function ensureStyle(doc: Document): void {
  if (!doc.head.querySelector("style[data-ownviz-style]")) {
    const style = doc.createElement("style");
    style.setAttribute("data-ownviz-style", "");
    style.textContent = RUNTIME_CSS;
    doc.head.appendChild(style);
  }
}

function ensureTooltip(doc: Document): HTMLElement {
  let tooltip = doc.body.querySelector<HTMLElement>(`.${TOOLTIP_CLASS}`);
  if (!tooltip) {
    tooltip = doc.createElement("div");
    tooltip.className = TOOLTIP_CLASS;
    tooltip.setAttribute("role", "tooltip");
    doc.body.appendChild(tooltip);
  }
  return tooltip;
}

function clearHighlights(): void {
  for (const element of activeHighlights.splice(0)) {
    element.classList.remove(HIGHLIGHT_CLASS);
  }
}

function applyHighlights(scope: PanelScope, hash: string): void {
  clearHighlights();
  const selector = `.code-var[data-hash="${hash}"], .code-fn[data-hash="${hash}"]`;
  for (const doc of scope.documents) {
    for (const span of doc.querySelectorAll(selector)) {
      span.classList.add(HIGHLIGHT_CLASS);
      activeHighlights.push(span);
    }
  }
}

function placeTooltip(
  tooltip: HTMLElement,
  event: MouseEvent,
  scope: PanelScope,
  binding: HoverBinding,
): void {
  const win = tooltip.ownerDocument.defaultView;
  // Events inside an <object> panel report frame-local coordinates.
  const host = scope.hostOf.get(binding.target.ownerDocument ?? tooltip.ownerDocument);
  const offset = host ? host.getBoundingClientRect() : { left: 0, top: 0 };
  let x = (event.clientX ?? 0) + offset.left + CURSOR_GAP;
  let y = (event.clientY ?? 0) + offset.top + CURSOR_GAP;
  const width = tooltip.offsetWidth || 0;
  const height = tooltip.offsetHeight || 0;
  const maxX = (win?.innerWidth ?? Infinity) - width - EDGE_PAD;
  const maxY = (win?.innerHeight ?? Infinity) - height - EDGE_PAD;
  tooltip.style.left = `${Math.max(0, Math.min(x, maxX))}px`;
  tooltip.style.top = `${Math.max(0, Math.min(y, maxY))}px`;
}

function bind(binding: HoverBinding, tooltip: HTMLElement, scope: PanelScope): void {
  const show = (event: Event) => {
    tooltip.textContent = binding.message;
    tooltip.style.visibility = "visible";
    placeTooltip(tooltip, event as MouseEvent, scope, binding);
    if (Number.isFinite(binding.hash)) {
      applyHighlights(scope, String(binding.hash));
    }
  };
  const move = (event: Event) => {
    if (tooltip.style.visibility === "visible") {
      placeTooltip(tooltip, event as MouseEvent, scope, binding);
    }
  };
  const hide = () => {
    tooltip.style.visibility = "hidden";
    clearHighlights();
  };
  binding.target.addEventListener("pointerover", show);
  binding.target.addEventListener("pointermove", move);
  binding.target.addEventListener("pointerout", hide);
}

/**
 * Wire hover behavior for every annotated element under the given root.
 * Returns the number of bindings in scope; a document without panels
 * yields 0 and is left untouched.
 */
export function attach_handlers(root: ParentNode): number {
  const scope = collectScope(root);
  let bindings = 0;
  let tooltip: HTMLElement | null = null;

  for (const doc of scope.documents) {
    for (const target of doc.querySelectorAll("[data-hover]")) {
      bindings += 1;
      if (target.hasAttribute(BOUND_FLAG)) {
        continue;
      }
      if (!tooltip) {
        const host = hostDocument(root);
        ensureStyle(host);
        tooltip = ensureTooltip(host);
      }
      target.setAttribute(BOUND_FLAG, "");
      bind(
        {
          target,
          hash: Number(target.getAttribute("data-hash")),
          message: target.getAttribute("data-hover") ?? "",
        },
        tooltip,
        scope,
      );
    }
  }
  return bindings;
}

export const attachHandlers = attach_handlers;

if (typeof document !== "undefined") {
  const start = () => attach_handlers(document);
  if (document.readyState === "loading") {
    document.addEventListener("DOMContentLoaded", start, { once: true });
  } else {
    start();
  }
}
