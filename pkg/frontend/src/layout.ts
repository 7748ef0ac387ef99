/**
 * Tidy-tree layout for node-link views: leaves get consecutive slots,
 * parents sit centered above their children, depth maps to y.
 */

export interface CorpusNode {
  id: string;
  attributes: Record<string, number | string | string[]>;
  children: CorpusNode[];
}

export interface PlacedNode {
  id: string;
  x: number;
  y: number;
  node: CorpusNode;
  parent: string | null;
}

export function layoutTree(root: CorpusNode, dx = 34, dy = 46): PlacedNode[] {
  const placed: PlacedNode[] = [];
  let nextSlot = 0;

  const place = (node: CorpusNode, depth: number, parent: string | null): number => {
    let x: number;
    if (node.children.length === 0) {
      x = nextSlot * dx;
      nextSlot += 1;
    } else {
      const xs = node.children.map((c) => place(c, depth + 1, node.id));
      x = (Math.min(...xs) + Math.max(...xs)) / 2;
    }
    placed.push({ id: node.id, x, y: depth * dy, node, parent });
    return x;
  };

  place(root, 0, null);
  return placed;
}

export function treeById(roots: CorpusNode[], wanted: Set<string>,
                         ids: string[]): Map<string, CorpusNode> {
  const out = new Map<string, CorpusNode>();
  roots.forEach((root, index) => {
    const treeId = ids[index];
    if (wanted.has(treeId)) out.set(treeId, root);
  });
  return out;
}

/** Size / height / width of a corpus tree (display metadata for filters). */
export function treeMetrics(root: CorpusNode): { size: number; height: number; width: number } {
  const perLevel: number[] = [];
  let size = 0;
  const walk = (node: CorpusNode, depth: number) => {
    size += 1;
    perLevel[depth] = (perLevel[depth] ?? 0) + 1;
    node.children.forEach((c) => walk(c, depth + 1));
  };
  walk(root, 0);
  return { size, height: perLevel.length, width: Math.max(...perLevel) };
}
