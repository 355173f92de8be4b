/** Serializing accepted trees as structural tag rows.
 *
 * This mirrors the server's encoding exactly so exports stay byte
 * compatible after local edits.  It proposes nothing: structure only
 * ever arrives from the server or from explicit annotator edits.
 *
 * Per token the relation compares the ancestor chain with the
 * predecessor's; the first condition (in precedence order) whose
 * ancestors exist and coincide wins, and a token whose conditions all
 * reach the virtual root gets rel 1.  cat names the token's parent
 * node, or NONE outside any chunk.
 */

import type { StructuralTag } from "./types.js";
import type { TreeItem } from "./trees.js";

export const NO_CAT = "NONE";
export const DEPTH_BOUND = 4;

export interface TagRow {
  tag: StructuralTag;
  word: string | null;
}

// rel, ancestor distance for the current token, distance for the previous
const CONDITIONS: [string, number, number][] = [
  ["0", 1, 1],
  ["+", 1, 2],
  ["++", 1, 3],
  ["-", 2, 1],
  ["--", 3, 1],
  ["=", 2, 2],
];

function ancestor(path: readonly number[], k: number): string | null {
  if (path.length - k < 1) {
    return null;
  }
  return path.slice(0, path.length - k).join(",");
}

function relation(path: readonly number[], prev: readonly number[]): string {
  for (const [rel, kCur, kPrev] of CONDITIONS) {
    const a = ancestor(path, kCur);
    if (a !== null && a === ancestor(prev, kPrev)) {
      return rel;
    }
  }
  return "1";
}

/** Structural tag rows for top-level items, one row per leaf. */
export function encodeItems(items: TreeItem[]): TagRow[] {
  const leaves: { pos: string; word: string | null; path: number[]; cat: string }[] = [];

  const walk = (item: TreeItem, path: number[], parentLabel: string): void => {
    if (item.kind === "leaf") {
      leaves.push({ pos: item.pos, word: item.word, path, cat: parentLabel });
    } else {
      item.children.forEach((child, k) => walk(child, [...path, k], item.label));
    }
  };
  items.forEach((item, k) => walk(item, [k], NO_CAT));

  const rows: TagRow[] = [];
  let prev: number[] | null = null;
  for (const entry of leaves) {
    if (entry.path.length > DEPTH_BOUND) {
      throw new Error(`leaf at depth ${entry.path.length} exceeds bound ${DEPTH_BOUND}`);
    }
    const rel = prev === null ? "1" : relation(entry.path, prev);
    rows.push({ tag: { pos: entry.pos, rel, cat: entry.cat }, word: entry.word });
    prev = entry.path;
  }
  return rows;
}
