import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { beforeEach, describe, expect, it } from "vitest";

import { attach_handlers } from "../src/ownviz-hover";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

const loadSvg = (name: string): string =>
  readFileSync(join(FIXTURES, name), "utf-8").replace(/<\?xml[^>]*\?>\s*/, "");

/** Inline both panels of the moves/copies/drops example, as mdbook pages do. */
const mountFigure1 = (): void => {
  document.body.innerHTML = `
    <div class="ownviz-example" data-example="moves_copies_drops">
      ${loadSvg("vis_code.svg")}
      ${loadSvg("vis_timeline.svg")}
    </div>`;
};

const classSnapshot = (): Array<string | null> =>
  Array.from(document.querySelectorAll("*")).map((el) => el.getAttribute("class"));

const pointer = (type: string, x = 40, y = 30): MouseEvent =>
  new MouseEvent(type, { bubbles: true, clientX: x, clientY: y });

const tooltip = (): HTMLElement | null =>
  document.querySelector<HTMLElement>(".ownviz-tooltip");

beforeEach(() => {
  document.head.innerHTML = "";
  document.body.innerHTML = "";
});

describe("attach_handlers", () => {
  it("yields zero bindings on a document without panels", () => {
    expect(attach_handlers(document)).toBe(0);
    expect(tooltip()).toBeNull();
  });

  it("binds every element that carries a hover message", () => {
    mountFigure1();
    const count = attach_handlers(document);
    expect(count).toBe(document.querySelectorAll("[data-hover]").length);
    expect(count).toBeGreaterThan(10);
  });

  it("is idempotent across repeated calls", () => {
    mountFigure1();
    const first = attach_handlers(document);
    expect(attach_handlers(document)).toBe(first);
    expect(document.querySelectorAll(".ownviz-tooltip")).toHaveLength(1);
  });

  it("shows the move tooltip and cross-highlights the function token", () => {
    mountFigure1();
    attach_handlers(document);

    const arrow = document.querySelector(
      'g.arrow[data-hover="Move from s to takes_ownership()"]',
    );
    expect(arrow).not.toBeNull();

    const before = classSnapshot();
    arrow!.dispatchEvent(pointer("pointerover"));

    expect(tooltip()!.textContent).toBe("Move from s to takes_ownership()");
    expect(tooltip()!.style.visibility).toBe("visible");

    // data-hash 3 is takes_ownership(); its code token lights up
    const token = document.querySelector('tspan.code-fn[data-hash="3"]');
    expect(token!.classList.contains("ownviz-highlight")).toBe(true);

    arrow!.dispatchEvent(pointer("pointerout"));
    expect(tooltip()!.style.visibility).toBe("hidden");
    expect(classSnapshot()).toEqual(before);
  });

  it("highlights every token sharing the hovered hash", () => {
    mountFigure1();
    attach_handlers(document);

    // the dot for x (hash 4); x appears four times in the code
    const dot = document.querySelector(
      'circle.dot[data-hash="4"][data-hover="x acquires ownership of a resource"]',
    );
    dot!.dispatchEvent(pointer("pointerover"));
    const lit = document.querySelectorAll(".ownviz-highlight");
    expect(lit).toHaveLength(4);
    dot!.dispatchEvent(pointer("pointerout"));
    expect(document.querySelectorAll(".ownviz-highlight")).toHaveLength(0);
  });

  it("moves highlights over when a second element is hovered first", () => {
    mountFigure1();
    attach_handlers(document);
    const before = classSnapshot();

    const arrow = document.querySelector(
      'g.arrow[data-hover="Move from s to takes_ownership()"]',
    )!;
    const label = document.querySelector('text.fn-label[data-hover="String::from()"]')!;

    arrow.dispatchEvent(pointer("pointerover"));
    label.dispatchEvent(pointer("pointerover")); // no pointerout in between
    expect(tooltip()!.textContent).toBe("String::from()");
    const lit = Array.from(document.querySelectorAll(".ownviz-highlight"));
    expect(lit.every((el) => el.getAttribute("data-hash") === "2")).toBe(true);

    label.dispatchEvent(pointer("pointerout"));
    expect(classSnapshot()).toEqual(before);
  });

  it("keeps the tooltip inside the viewport", () => {
    mountFigure1();
    attach_handlers(document);
    const dot = document.querySelector("circle.dot[data-hover]")!;
    dot.dispatchEvent(pointer("pointerover", window.innerWidth + 500, window.innerHeight + 500));
    const left = parseFloat(tooltip()!.style.left);
    const top = parseFloat(tooltip()!.style.top);
    expect(left).toBeLessThanOrEqual(window.innerWidth);
    expect(top).toBeLessThanOrEqual(window.innerHeight);
  });

  it("repositions the tooltip as the pointer moves", () => {
    mountFigure1();
    attach_handlers(document);
    const dot = document.querySelector("circle.dot[data-hover]")!;
    dot.dispatchEvent(pointer("pointerover", 10, 10));
    const first = tooltip()!.style.left;
    dot.dispatchEvent(pointer("pointermove", 120, 10));
    expect(tooltip()!.style.left).not.toBe(first);
  });
});
