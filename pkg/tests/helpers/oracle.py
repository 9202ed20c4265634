"""Exhaustive-matching oracle for tree-diff similarity.

Re-implements the matching constraints and operation classification from
first principles and searches over every maximal valid matching, so it is
independent of the greedy matcher it checks. Only usable on small trees.
"""

from collections import Counter
from dataclasses import dataclass

from sqlrag.ast.nodes import AstNode, NodeKind

_MASKABLE = (NodeKind.IDENTIFIER_TABLE, NodeKind.IDENTIFIER_COLUMN, NodeKind.LITERAL)
_THRESHOLD = 0.6


@dataclass
class OracleResult:
    score: float
    n_alignments: int
    n_total_ops: int
    op_counts: dict
    mapping: dict


def _index(root):
    nodes, parents = [], []

    def visit(n, parent):
        idx = len(nodes)
        nodes.append(n)
        parents.append(parent)
        for c in n.children:
            visit(c, idx)

    visit(root, None)
    leaves = [i for i, n in enumerate(nodes) if not n.children]
    inners = [i for i, n in enumerate(nodes) if n.children]
    under = [set() for _ in nodes]
    for i in reversed(range(len(nodes))):
        if not nodes[i].children:
            under[i].add(i)
        if parents[i] is not None:
            under[parents[i]] |= under[i]
    return nodes, parents, leaves, inners, under


def _dice(a, b):
    if a == b:
        return 1.0
    if len(a) < 2 or len(b) < 2:
        return 0.0
    ga = Counter(a[i:i + 2] for i in range(len(a) - 1))
    gb = Counter(b[i:i + 2] for i in range(len(b) - 1))
    common = sum(min(ga[g], c) for g, c in gb.items())
    return 2.0 * common / (sum(ga.values()) + sum(gb.values()))


def _masked(n):
    return n.text == "_" and n.kind in _MASKABLE


def _leaves_ok(a, b):
    if not (a.kind is b.kind or (_masked(a) and _masked(b))):
        return False
    return _dice(a.text, b.text) >= _THRESHOLD


def oracle_similarity(source_root: AstNode, target_root: AstNode) -> OracleResult:
    s_nodes, s_par, s_leaves, s_inners, s_under = _index(source_root)
    t_nodes, t_par, t_leaves, t_inners, t_under = _index(target_root)

    eligible = {
        i: [j for j in t_leaves if _leaves_ok(s_nodes[i], t_nodes[j])]
        for i in s_leaves
    }

    best: list = [None]

    def classify(mapping):
        ops = Counter()
        for i, j in mapping.items():
            pi, pj = s_par[i], t_par[j]
            in_place = (pi is None and pj is None) or (
                pi is not None and mapping.get(pi) == pj)
            changed = s_nodes[i].text != t_nodes[j].text
            if not in_place:
                ops["move"] += 1
            if changed:
                ops["update"] += 1
            if in_place and not changed:
                ops["alignment"] += 1
        ops["delete"] = len(s_nodes) - len(mapping)
        ops["insert"] = len(t_nodes) - len(mapping)
        total = sum(ops.values())
        score = ops["alignment"] / total if total else 1.0
        return score, ops, total

    def consider(mapping):
        score, ops, total = classify(mapping)
        key = (score, ops["alignment"], -total, tuple(sorted(mapping.items())))
        if best[0] is None or key > best[0][0]:
            best[0] = (key, score, dict(ops), total, dict(mapping))

    def inner_step(k, mapping, used):
        if k == len(s_inners):
            # keep only maximal inner matchings
            for i in s_inners:
                if i in mapping:
                    continue
                for j in t_inners:
                    if j in used or s_nodes[i].kind is not t_nodes[j].kind:
                        continue
                    if _ratio(i, j, mapping) >= _THRESHOLD:
                        return
            consider(mapping)
            return
        i = s_inners[k]
        inner_step(k + 1, mapping, used)
        for j in t_inners:
            if j in used or s_nodes[i].kind is not t_nodes[j].kind:
                continue
            if _ratio(i, j, mapping) < _THRESHOLD:
                continue
            mapping[i] = j
            used.add(j)
            inner_step(k + 1, mapping, used)
            del mapping[i]
            used.remove(j)

    def _ratio(i, j, mapping):
        common = sum(1 for l in s_under[i] if mapping.get(l) in t_under[j])
        return common / max(len(s_under[i]), len(t_under[j]))

    def leaf_step(k, mapping, used):
        if k == len(s_leaves):
            for i in s_leaves:  # keep only maximal leaf matchings
                if i in mapping:
                    continue
                if any(j not in used for j in eligible[i]):
                    return
            inner_step(0, mapping, used)
            return
        i = s_leaves[k]
        leaf_step(k + 1, mapping, used)
        for j in eligible[i]:
            if j in used:
                continue
            mapping[i] = j
            used.add(j)
            leaf_step(k + 1, mapping, used)
            del mapping[i]
            used.remove(j)

    leaf_step(0, {}, set())
    _, score, ops, total, mapping = best[0]
    return OracleResult(score=score, n_alignments=ops.get("alignment", 0),
                        n_total_ops=total, op_counts=ops, mapping=mapping)
