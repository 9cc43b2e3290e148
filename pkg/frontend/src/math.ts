/** Renders the service's LaTeX dialect to HTML.
 *
 * The compiler emits a fixed vocabulary (big operators with sub/superscript
 * bounds, the usual connectives, set glyphs, subscripted indices); that is
 * all this renderer understands. Unknown commands render as their name so
 * nothing is ever silently dropped.
 */

const GLYPHS: Record<string, string> = {
  bigwedge: "⋀",
  bigvee: "⋁",
  land: "∧",
  lor: "∨",
  lnot: "¬",
  Rightarrow: "⇒",
  Leftrightarrow: "⇔",
  in: "∈",
  neq: "≠",
  leq: "≤",
  geq: "≥",
  cup: "∪",
  cap: "∩",
  setminus: "∖",
  top: "⊤",
  bot: "⊥",
  cdot: "⋅",
  bmod: "mod",  // the service always emits "\bmod" with surrounding spaces
};

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

class Reader {
  pos = 0;
  constructor(public src: string) {}
  peek(): string {
    return this.src[this.pos] ?? "";
  }
  take(): string {
    return this.src[this.pos++] ?? "";
  }
  done(): boolean {
    return this.pos >= this.src.length;
  }
}

function readCommand(r: Reader): string {
  let name = "";
  while (!r.done() && /[a-zA-Z]/.test(r.peek())) {
    name += r.take();
  }
  return name;
}

function renderGroup(r: Reader): string {
  // caller consumed '{'; renders until the matching '}'
  let out = "";
  while (!r.done() && r.peek() !== "}") {
    out += renderToken(r);
  }
  r.take(); // '}'
  return out;
}

function renderScript(r: Reader, tag: "sub" | "sup"): string {
  if (r.peek() === "{") {
    r.take();
    return `<${tag}>${renderGroup(r)}</${tag}>`;
  }
  return `<${tag}>${renderToken(r)}</${tag}>`;
}

function renderToken(r: Reader): string {
  const ch = r.take();
  if (ch === "\\") {
    if (r.peek() === "{" || r.peek() === "}") {
      return escapeHtml(r.take());
    }
    const name = readCommand(r);
    if (name === "sqrt") {
      if (r.peek() === "{") {
        r.take();
        return `√<span class="sqrt">${renderGroup(r)}</span>`;
      }
      return "√";
    }
    if (name === "bigwedge" || name === "bigvee") {
      let html = `<span class="bigop">${GLYPHS[name]}</span>`;
      // bounds may come in either order: ^{...}_{...} or _{...}
      while (r.peek() === "^" || r.peek() === "_") {
        const tag = r.take() === "^" ? "sup" : "sub";
        html += renderScript(r, tag);
      }
      return `<span class="quant">${html}</span>`;
    }
    const glyph = GLYPHS[name];
    return glyph !== undefined ? escapeHtml(glyph) : escapeHtml(name);
  }
  if (ch === "_") {
    return renderScript(r, "sub");
  }
  if (ch === "^") {
    return renderScript(r, "sup");
  }
  if (ch === "{") {
    return renderGroup(r);
  }
  if (ch === "}") {
    return "";
  }
  return escapeHtml(ch);
}

export function renderMath(latex: string): string {
  const r = new Reader(latex);
  let out = "";
  while (!r.done()) {
    out += renderToken(r);
  }
  return out;
}

/** One line of HTML per formula line. */
export function renderMathLines(latex: string): string {
  return latex
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => `<div class="math-line">${renderMath(line)}</div>`)
    .join("");
}
