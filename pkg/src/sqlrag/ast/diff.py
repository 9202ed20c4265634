"""Change-distilling-style tree differencing between normalized SQL trees.

Matching: leaves pair when their kinds are compatible and the bigram Dice
similarity of their texts is >= 0.6 (masked identifier/value leaves are
mutually compatible regardless of kind); inner nodes pair when kinds are
equal and the fraction of their leaves matched to each other's leaves is
>= 0.6. Candidate pairs are taken greedily in order of descending
similarity; ties prefer pairs of equal kind, then pairs whose ancestor
chains agree (kind and clause/function head compared level by level,
nearest ancestor first), then the earliest pre-order positions. Without
the context-aware tie-breaks a masked select-item leaf can capture a
masked from-clause or function-argument leaf and destroy alignments that
an optimal matcher finds.

Edit script: unmatched target nodes become inserts, unmatched source nodes
deletes. A matched pair emits a move when its parents are not matched to
each other, an update when texts differ (possibly alongside a move), and an
alignment otherwise; reordering within the same parent requires no
operation beyond the alignment.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..errors import ModeMismatch
from .nodes import AstNode, NodeKind, NormalizedAst, trees_equal

MATCH_THRESHOLD = 0.6

INSERT = "insert"
DELETE = "delete"
UPDATE = "update"
MOVE = "move"
ALIGNMENT = "alignment"


@dataclass(frozen=True)
class EditOp:
    op: str
    source_index: int | None
    target_index: int | None
    source: AstNode | None
    target: AstNode | None


@dataclass(frozen=True)
class EditScript:
    ops: tuple[EditOp, ...]
    source_root: AstNode
    target_root: AstNode

    @property
    def n_alignments(self) -> int:
        return sum(1 for op in self.ops if op.op == ALIGNMENT)

    @property
    def n_total_ops(self) -> int:
        return len(self.ops)


@dataclass(frozen=True)
class AstSimilarity:
    score: float
    n_alignments: int
    n_total_ops: int


class _Indexed:
    """Pre-order arrays for one tree."""

    def __init__(self, root: AstNode):
        self.nodes: list[AstNode] = []
        self.parent: list[int | None] = []
        self.children: list[list[int]] = []
        self._build(root, None)
        self.leaf_ids = [i for i, n in enumerate(self.nodes) if n.is_leaf]
        self.inner_ids = [i for i, n in enumerate(self.nodes) if not n.is_leaf]
        self.leaves_under: list[frozenset[int]] = [frozenset()] * len(self.nodes)
        for i in reversed(range(len(self.nodes))):
            if self.nodes[i].is_leaf:
                self.leaves_under[i] = frozenset((i,))
            else:
                acc: set[int] = set()
                for c in self.children[i]:
                    acc |= self.leaves_under[c]
                self.leaves_under[i] = frozenset(acc)
        self.labels = [self._label(n) for n in self.nodes]

    def _build(self, n: AstNode, parent: int | None) -> int:
        idx = len(self.nodes)
        self.nodes.append(n)
        self.parent.append(parent)
        self.children.append([])
        if parent is not None:
            self.children[parent].append(idx)
        for child in n.children:
            self._build(child, idx)
        return idx

    @staticmethod
    def _label(n: AstNode) -> tuple:
        # Function applications are distinguished by their head operator so
        # that e.g. MIN(...) and a comparison do not count as equal context.
        head = ""
        if n.children and n.children[0].kind is NodeKind.OPERATOR:
            head = n.children[0].text
        return (n.kind, head)

    def ancestry(self, i: int) -> list[tuple]:
        out = []
        p = self.parent[i]
        while p is not None:
            out.append(self.labels[p])
            p = self.parent[p]
        return out


def text_similarity(a: str, b: str) -> float:
    """Bigram Dice coefficient; exact equality short-circuits to 1.0 so
    one-character texts (masks, operators) remain comparable."""
    if a == b:
        return 1.0
    if len(a) < 2 or len(b) < 2:
        return 0.0
    grams_a = Counter(a[i:i + 2] for i in range(len(a) - 1))
    grams_b = Counter(b[i:i + 2] for i in range(len(b) - 1))
    common = sum(min(grams_a[g], count) for g, count in grams_b.items())
    return 2.0 * common / (sum(grams_a.values()) + sum(grams_b.values()))


def leaves_compatible(a: AstNode, b: AstNode) -> bool:
    return a.kind is b.kind or (a.is_masked and b.is_masked)


def _match(src: _Indexed, tgt: _Indexed) -> dict[int, int]:
    mapping: dict[int, int] = {}
    used_targets: set[int] = set()

    leaf_candidates: list[tuple] = []
    for i in src.leaf_ids:
        a = src.nodes[i]
        for j in tgt.leaf_ids:
            b = tgt.nodes[j]
            if not leaves_compatible(a, b):
                continue
            sim = text_similarity(a.text, b.text)
            if sim >= MATCH_THRESHOLD:
                kind_penalty = 0 if a.kind is b.kind else 1
                context = _context_penalty(src, tgt, i, j)
                leaf_candidates.append((-sim, kind_penalty, context, i, j))
    leaf_candidates.sort()
    for _sim, _kp, _ctx, i, j in leaf_candidates:
        if i not in mapping and j not in used_targets:
            mapping[i] = j
            used_targets.add(j)

    inner_candidates: list[tuple] = []
    for i in src.inner_ids:
        a = src.nodes[i]
        for j in tgt.inner_ids:
            b = tgt.nodes[j]
            if a.kind is not b.kind:
                continue
            ratio = _leaf_ratio(src, tgt, mapping, i, j)
            if ratio >= MATCH_THRESHOLD:
                context = _context_penalty(src, tgt, i, j)
                inner_candidates.append((-ratio, context, i, j))
    inner_candidates.sort()
    for _ratio, _ctx, i, j in inner_candidates:
        if i not in mapping and j not in used_targets:
            mapping[i] = j
            used_targets.add(j)
    return mapping


def _context_penalty(src: _Indexed, tgt: _Indexed, i: int, j: int) -> tuple:
    """Level-by-level disagreement of the two ancestor chains, nearest
    ancestor first: 0 = same kind and head, 1 = same kind, 2 = different."""
    chain_a = src.ancestry(i)
    chain_b = tgt.ancestry(j)
    out = []
    for k in range(max(len(chain_a), len(chain_b))):
        if k >= len(chain_a) or k >= len(chain_b):
            out.append(2)
        elif chain_a[k] == chain_b[k]:
            out.append(0)
        elif chain_a[k][0] is chain_b[k][0]:
            out.append(1)
        else:
            out.append(2)
    return tuple(out)


def _leaf_ratio(src: _Indexed, tgt: _Indexed, mapping: dict[int, int],
                i: int, j: int) -> float:
    src_leaves = src.leaves_under[i]
    tgt_leaves = tgt.leaves_under[j]
    common = sum(1 for l in src_leaves if mapping.get(l) in tgt_leaves)
    return common / max(len(src_leaves), len(tgt_leaves))


def _build_script(src: _Indexed, tgt: _Indexed,
                  mapping: dict[int, int]) -> list[EditOp]:
    reverse = {j: i for i, j in mapping.items()}
    ops: list[EditOp] = []
    for j, t_node in enumerate(tgt.nodes):
        if j not in reverse:
            ops.append(EditOp(INSERT, None, j, None, t_node))
            continue
        i = reverse[j]
        s_node = src.nodes[i]
        s_parent = src.parent[i]
        t_parent = tgt.parent[j]
        in_place = (
            (s_parent is None and t_parent is None)
            or (s_parent is not None and mapping.get(s_parent) == t_parent)
        )
        changed = s_node.text != t_node.text
        if not in_place:
            ops.append(EditOp(MOVE, i, j, s_node, t_node))
        if changed:
            ops.append(EditOp(UPDATE, i, j, s_node, t_node))
        if in_place and not changed:
            ops.append(EditOp(ALIGNMENT, i, j, s_node, t_node))
    for i, s_node in enumerate(src.nodes):
        if i not in mapping:
            ops.append(EditOp(DELETE, i, None, s_node, None))
    return ops


def diff(source: NormalizedAst, target: NormalizedAst) -> EditScript:
    if source.mode is not target.mode:
        raise ModeMismatch(
            f"cannot diff {source.mode.value} against {target.mode.value}")
    src = _Indexed(source.root)
    tgt = _Indexed(target.root)
    mapping = _match(src, tgt)
    ops = _build_script(src, tgt, mapping)
    return EditScript(tuple(ops), source.root, target.root)


def similarity(source: NormalizedAst, target: NormalizedAst) -> AstSimilarity:
    script = diff(source, target)
    total = script.n_total_ops
    aligned = script.n_alignments
    score = aligned / total if total else 1.0
    return AstSimilarity(score=score, n_alignments=aligned, n_total_ops=total)


def apply_script(script: EditScript) -> AstNode:
    """Replay the script against its source tree, reusing every matched
    source node, and return the resulting tree. The result compares equal
    to the target (up to masked-leaf kinds) iff the script is sound."""
    src = _Indexed(script.source_root)
    tgt = _Indexed(script.target_root)
    by_target: dict[int, EditOp] = {}
    consumed_sources: set[int] = set()
    deleted: set[int] = set()
    for op in script.ops:
        if op.op == DELETE:
            deleted.add(op.source_index)
            continue
        if op.op == INSERT:
            if op.target_index in by_target:
                raise ValueError("target node covered twice")
            by_target[op.target_index] = op
            continue
        # matched-pair ops; move+update may both reference the same pair
        existing = by_target.get(op.target_index)
        if existing is not None and existing.source_index != op.source_index:
            raise ValueError("target node matched to two sources")
        if op.op == UPDATE or existing is None:
            by_target[op.target_index] = op
        consumed_sources.add(op.source_index)
    for i in range(len(src.nodes)):
        if i not in consumed_sources and i not in deleted:
            raise ValueError(f"source node {i} neither matched nor deleted")

    def build(j: int) -> AstNode:
        op = by_target.get(j)
        if op is None:
            raise ValueError(f"target node {j} not covered by the script")
        children = tuple(build(c) for c in tgt.children[j])
        t_node = tgt.nodes[j]
        if op.op == INSERT:
            return AstNode(t_node.kind, t_node.text, children)
        s_node = src.nodes[op.source_index]
        text = t_node.text if op.op == UPDATE else s_node.text
        return AstNode(s_node.kind, text, children)

    return build(0)


def script_is_sound(script: EditScript) -> bool:
    try:
        rebuilt = apply_script(script)
    except ValueError:
        return False
    return trees_equal(rebuilt, script.target_root)
