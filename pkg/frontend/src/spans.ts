/** Mapping service diagnostic spans (byte offsets into the merged source)
 * to character ranges in the sets/formulas editors, and building the
 * highlight backdrop HTML. */

export interface EditorRange {
  editor: "sets" | "formulas";
  from: number;
  to: number;
}

export function byteToChar(text: string, byteOffset: number): number {
  const enc = new TextEncoder();
  let bytes = 0;
  for (let i = 0; i < text.length; i++) {
    if (bytes >= byteOffset) {
      return i;
    }
    bytes += enc.encode(text[i] ?? "").length;
  }
  return text.length;
}

/** The merged source is setsText (right-trimmed) + "\n" + source. */
export function spanToEditor(
  setsText: string,
  source: string,
  span: [number, number],
): EditorRange {
  const sets = setsText.replace(/\s+$/, "");
  const merged = sets.length > 0 ? `${sets}\n${source}` : source;
  const from = byteToChar(merged, span[0]);
  const to = Math.max(from, byteToChar(merged, span[1]));
  const prefix = sets.length > 0 ? sets.length + 1 : 0;
  if (from < prefix) {
    return {
      editor: "sets",
      from: Math.min(from, setsText.length),
      to: Math.min(to, setsText.length),
    };
  }
  return {
    editor: "formulas",
    from: from - prefix,
    to: Math.min(Math.max(to - prefix, from - prefix), source.length),
  };
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

/** Editor text with <mark> around each range, for the backdrop overlay. */
export function highlightHtml(text: string, ranges: Array<[number, number]>): string {
  const sorted = ranges
    .map(([a, b]): [number, number] => [
      Math.max(0, Math.min(a, text.length)),
      Math.max(0, Math.min(b, text.length)),
    ])
    .filter(([a, b]) => b > a)
    .sort((x, y) => x[0] - y[0]);
  let out = "";
  let pos = 0;
  for (const [from, to] of sorted) {
    if (from < pos) {
      continue; // overlapping range already covered
    }
    out += escapeHtml(text.slice(pos, from));
    out += `<mark>${escapeHtml(text.slice(from, to))}</mark>`;
    pos = to;
  }
  out += escapeHtml(text.slice(pos));
  return out + "\n"; // keeps the backdrop's last line aligned
}
