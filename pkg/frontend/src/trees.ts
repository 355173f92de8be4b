/** Chunk trees and the bracketed text format.
 *
 * A tree item is either a leaf (POS plus optional word) or a labelled
 * node with child items.  The bracketed form puts every item in
 * parentheses, a leaf as `(POS word)` with `_` for a missing word.
 * Symbols are kept verbatim, so a round trip through parse and format
 * reproduces the input byte for byte.
 */

export const MISSING_WORD = "_";

export interface TreeLeaf {
  kind: "leaf";
  pos: string;
  word: string | null;
}

export interface TreeNode {
  kind: "node";
  label: string;
  children: TreeItem[];
}

export type TreeItem = TreeLeaf | TreeNode;

export function leaf(pos: string, word: string | null = null): TreeLeaf {
  return { kind: "leaf", pos, word };
}

export function node(label: string, children: TreeItem[]): TreeNode {
  return { kind: "node", label, children };
}

function checkAtom(atom: string): void {
  if (!atom || /[()\s]/.test(atom)) {
    throw new Error(`symbol or word not writable in bracketed format: ${JSON.stringify(atom)}`);
  }
}

export function formatItem(item: TreeItem): string {
  if (item.kind === "leaf") {
    const word = item.word ?? MISSING_WORD;
    checkAtom(item.pos);
    checkAtom(word);
    return `(${item.pos} ${word})`;
  }
  checkAtom(item.label);
  const inner = item.children.map(formatItem).join(" ");
  return `(${item.label} ${inner})`;
}

/** One tree per call site: items joined by single spaces. */
export function formatItems(items: TreeItem[]): string {
  return items.map(formatItem).join(" ");
}

export function parseBracketed(text: string): TreeItem[] {
  const tokens = text.match(/[()]|[^()\s]+/g) ?? [];
  let at = 0;

  function take(): string {
    const token = tokens[at];
    if (token === undefined) {
      throw new Error("unexpected end of bracketed text");
    }
    at += 1;
    return token;
  }

  function expr(): TreeItem {
    if (take() !== "(") {
      throw new Error("expected '('");
    }
    const head = take();
    if (head === "(" || head === ")") {
      throw new Error("missing symbol after '('");
    }
    if (tokens[at] === "(") {
      const children: TreeItem[] = [];
      while (tokens[at] === "(") {
        children.push(expr());
      }
      if (take() !== ")") {
        throw new Error("bare word inside a phrase node");
      }
      return node(head, children);
    }
    const word = take();
    if (word === ")") {
      throw new Error(`(${head}) has neither word nor children`);
    }
    if (take() !== ")") {
      throw new Error(`extra material after word ${JSON.stringify(word)}`);
    }
    return leaf(head, word === MISSING_WORD ? null : word);
  }

  const items: TreeItem[] = [];
  while (at < tokens.length) {
    items.push(expr());
  }
  return items;
}

/** Leaves of the items in token order. */
export function treeLeaves(items: TreeItem[]): TreeLeaf[] {
  const out: TreeLeaf[] = [];
  const visit = (item: TreeItem): void => {
    if (item.kind === "leaf") {
      out.push(item);
    } else {
      item.children.forEach(visit);
    }
  };
  items.forEach(visit);
  return out;
}

export function cloneItem<T extends TreeItem>(item: T): T {
  if (item.kind === "leaf") {
    return { ...item };
  }
  return { ...item, children: item.children.map(cloneItem) } as T;
}

/** Node addressed by child indices from a root item; [] is the root. */
export function nodeAt(root: TreeItem, path: readonly number[]): TreeNode | null {
  let current: TreeItem = root;
  for (const index of path) {
    if (current.kind !== "node") {
      return null;
    }
    const child: TreeItem | undefined = current.children[index];
    if (child === undefined) {
      return null;
    }
    current = child;
  }
  return current.kind === "node" ? current : null;
}
