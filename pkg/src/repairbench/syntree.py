"""Labeled ordered syntax trees for C-family sources, plus tree edit distance.

The parse is a deterministic structural one: comments are stripped, the
token stream is nested by bracket structure, and every token becomes a
labeled node. It is error-tolerant by construction, so buggy student code
still yields a tree (stray closers become ordinary leaves). Node labels are
token texts; literals stay as leaf labels.

Distance is the classic ordered-tree edit distance under unit costs
(insert = delete = relabel = 1), computed with the Zhang-Shasha dynamic
program over keyroots.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

__all__ = ["Node", "SyntaxTree", "ParseError", "parse_source", "ted"]


class ParseError(ValueError):
    pass


@dataclass
class Node:
    label: str
    children: list["Node"] = field(default_factory=list)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


@dataclass
class SyntaxTree:
    root: Node

    @property
    def size(self) -> int:
        return self.root.size()


_TOKEN_RE = re.compile(
    r"""
      "(?:\\.|[^"\\\n])*"?          # string literal
    | '(?:\\.|[^'\\\n])*'?          # char literal
    | [A-Za-z_]\w*                  # identifier / keyword
    | \d(?:[\w.]|[eE][+-])*         # numeric literal
    | ->\*|<<=|>>=|\.\.\.|::|->|\+\+|--|<<|>>|<=|>=|==|!=|&&|\|\||[+\-*/%&|^!=<>]=?
    | [~?:;,.#]
    | [()\[\]{}]
    """,
    re.VERBOSE,
)

_COMMENT_RE = re.compile(r"//[^\n]*|/\*.*?(?:\*/|\Z)", re.DOTALL)

_OPEN = {"(": "()", "[": "[]", "{": "{}"}
_CLOSE = {")": "(", "]": "[", "}": "{"}


def _tokenize(code: str) -> list[str]:
    return _TOKEN_RE.findall(_COMMENT_RE.sub(" ", code))


def parse_source(code: str) -> SyntaxTree:
    """Deterministic labeled ordered tree of a program; comments excluded."""
    tokens = _tokenize(code)
    if not tokens:
        raise ParseError("no tokens in source")
    root = Node("unit")
    stack = [root]
    for tok in tokens:
        if tok in _OPEN:
            group = Node(_OPEN[tok])
            stack[-1].children.append(group)
            stack.append(group)
        elif tok in _CLOSE:
            # Pop only a matching group; a stray closer degrades to a leaf.
            if len(stack) > 1 and stack[-1].label == _OPEN[_CLOSE[tok]]:
                stack.pop()
            else:
                stack[-1].children.append(Node(tok))
        else:
            stack[-1].children.append(Node(tok))
    return SyntaxTree(root)


class _Annotated:
    """Postorder arrays used by the Zhang-Shasha dynamic program."""

    def __init__(self, root: Node):
        self.labels: list[str] = []
        self.leftmost: list[int] = []  # l(i): postorder id of i's leftmost leaf

        def walk(node: Node) -> int:
            first_leaf = None
            for child in node.children:
                leaf = walk(child)
                if first_leaf is None:
                    first_leaf = leaf
            my_id = len(self.labels)
            self.labels.append(node.label)
            self.leftmost.append(first_leaf if first_leaf is not None else my_id)
            return self.leftmost[my_id]

        walk(root)
        n = len(self.labels)
        self.keyroots = [
            i for i in range(n) if not any(self.leftmost[j] == self.leftmost[i] for j in range(i + 1, n))
        ]


def ted(a: SyntaxTree | Node, b: SyntaxTree | Node) -> int:
    """Minimum unit-cost edit script length between two ordered labeled trees."""
    ta = _Annotated(a.root if isinstance(a, SyntaxTree) else a)
    tb = _Annotated(b.root if isinstance(b, SyntaxTree) else b)
    la, lb = ta.leftmost, tb.leftmost
    m, n = len(ta.labels), len(tb.labels)
    dist = [[0] * n for _ in range(m)]

    for i in ta.keyroots:
        for j in tb.keyroots:
            # forest distance over the subforests rooted at keyroots i, j
            ioff, joff = la[i] - 1, lb[j] - 1
            rows, cols = i - ioff, j - joff
            fd = [[0] * (cols + 1) for _ in range(rows + 1)]
            for x in range(1, rows + 1):
                fd[x][0] = fd[x - 1][0] + 1
            for y in range(1, cols + 1):
                fd[0][y] = fd[0][y - 1] + 1
            for x in range(1, rows + 1):
                for y in range(1, cols + 1):
                    if la[x + ioff] == la[i] and lb[y + joff] == lb[j]:
                        relabel = 0 if ta.labels[x + ioff] == tb.labels[y + joff] else 1
                        fd[x][y] = min(
                            fd[x - 1][y] + 1,
                            fd[x][y - 1] + 1,
                            fd[x - 1][y - 1] + relabel,
                        )
                        dist[x + ioff][y + joff] = fd[x][y]
                    else:
                        px = la[x + ioff] - 1 - ioff
                        py = lb[y + joff] - 1 - joff
                        fd[x][y] = min(
                            fd[x - 1][y] + 1,
                            fd[x][y - 1] + 1,
                            fd[px][py] + dist[x + ioff][y + joff],
                        )
    return dist[m - 1][n - 1]
