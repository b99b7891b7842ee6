"""Independent brute-force oracles used to cross-check the real implementations.

These deliberately avoid importing the algorithms they exist to check:
the edit-distance oracle enumerates Tai mappings directly instead of using
any dynamic program, and the metric oracles count outcomes by exhaustive
iteration over trial subsets.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction


class OTree:
    """A plain labeled ordered tree for oracle purposes."""

    __slots__ = ("label", "children")

    def __init__(self, label, children=()):
        self.label = label
        self.children = list(children)

    def size(self):
        return 1 + sum(c.size() for c in self.children)


def _flatten(tree):
    """Postorder list of (postorder_index, label, ancestor_index_set)."""
    out = []

    def walk(node, ancestors):
        my_ancestors = set(ancestors)
        child_anc = ancestors + [node]
        for child in node.children:
            walk(child, child_anc)
        out.append((node, my_ancestors))

    walk(tree, [])
    index_of = {id(node): i for i, (node, _) in enumerate(out)}
    return [
        (i, node.label, {index_of[id(a)] for a in anc})
        for i, (node, anc) in enumerate(out)
    ]


def ted_oracle(t1, t2):
    """Tree edit distance by exhaustive enumeration of valid Tai mappings.

    A mapping is a set of node pairs that preserves postorder and the
    ancestor relation in both directions.  Cost of a mapping is the number
    of unmatched nodes plus the number of matched pairs with differing
    labels.  Only feasible for very small trees.
    """
    a = _flatten(t1)
    b = _flatten(t2)
    na, nb = len(a), len(b)
    best = na + nb  # empty mapping: delete everything, insert everything

    b_indices = list(range(nb))
    for k in range(1, min(na, nb) + 1):
        for a_sel in itertools.combinations(range(na), k):
            for b_sel in itertools.permutations(b_indices, k):
                # order preservation: a_sel ascending must map to ascending b
                if any(b_sel[i] >= b_sel[i + 1] for i in range(k - 1)):
                    continue
                ok = True
                for i in range(k):
                    for j in range(i + 1, k):
                        # both directions: i ancestor of j, j ancestor of i
                        if (a_sel[i] in a[a_sel[j]][2]) != (b_sel[i] in b[b_sel[j]][2]):
                            ok = False
                            break
                        if (a_sel[j] in a[a_sel[i]][2]) != (b_sel[j] in b[b_sel[i]][2]):
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    continue
                relabels = sum(
                    1 for i in range(k) if a[a_sel[i]][1] != b[b_sel[i]][1]
                )
                cost = (na - k) + (nb - k) + relabels
                if cost < best:
                    best = cost
    return best


def all_trees(n, alphabet):
    """Every labeled ordered tree with exactly n nodes over the alphabet."""
    if n == 0:
        return []
    shapes = []

    def child_partitions(total):
        if total == 0:
            yield []
            return
        for first in range(1, total + 1):
            for rest in child_partitions(total - first):
                yield [first] + rest

    def build(size):
        if size == 1:
            return [[]]  # one shape: leaf (children shape lists)
        out = []
        for part in child_partitions(size - 1):
            child_options = [build(p) for p in part]
            for combo in itertools.product(*child_options):
                out.append(list(combo))
        return out

    shapes = build(n)

    def label_shape(shape):
        # shape is a nested list-of-lists structure; enumerate labelings
        def count_nodes(s):
            return 1 + sum(count_nodes(c) for c in s)

        total = count_nodes(shape)
        for labels in itertools.product(alphabet, repeat=total):
            it = iter(labels)

            def attach(s):
                lab = next(it)
                return OTree(lab, [attach(c) for c in s])

            yield attach(shape)

    trees = []
    for shape in shapes:
        trees.extend(label_shape(shape))
    return trees


def random_tree(rng: random.Random, max_nodes: int, alphabet: str) -> OTree:
    n = rng.randint(1, max_nodes)
    nodes = [OTree(rng.choice(alphabet)) for _ in range(n)]
    for i in range(1, n):
        parent = nodes[rng.randrange(i)]
        parent.children.append(nodes[i])
    return nodes[0]


def top_k_oracle(rows, k):
    """rows: list of per-submission bool lists (trials). Fraction of rows
    with any success among the first k trials."""
    if not rows:
        raise ValueError("no rows")
    hits = sum(1 for row in rows if any(row[:k]))
    return Fraction(hits, len(rows))


def avg_k_oracle(rows, k):
    """Mean over all k-subsets of trial columns of the solved fraction."""
    if not rows:
        raise ValueError("no rows")
    n_trials = len(rows[0])
    combos = list(itertools.combinations(range(n_trials), k))
    total = Fraction(0)
    for combo in combos:
        solved = sum(1 for row in rows if any(row[i] for i in combo))
        total += Fraction(solved, len(rows))
    return total / len(combos)
