import random

import pytest

from repairbench.syntree import Node, ParseError, parse_source, ted

from .oracles import OTree, all_trees, random_tree, ted_oracle


def _to_node(otree: OTree) -> Node:
    return Node(otree.label, tuple(_to_node(c) for c in otree.children))


def test_parse_determinism():
    code = "int main() { int x = 1; return x; }"
    assert parse_source(code).root == parse_source(code).root


def test_parse_size_golden():
    # frozen: unit, int, main, (), {}, return, 0, ;
    tree = parse_source("int main(){return 0;}")
    assert tree.size == 8


def test_comments_do_not_affect_tree():
    plain = "int main() { return 0; }"
    commented = "// leading\nint main() { /* inner */ return 0; } // trailing"
    assert parse_source(plain).root == parse_source(commented).root


def test_whitespace_does_not_affect_tree():
    a = "int main(){return 0;}"
    b = "int  main ( )\n{\n    return 0 ;\n}\n"
    assert parse_source(a).root == parse_source(b).root


def test_string_literals_kept_whole():
    tree = parse_source('int main(){ puts("a { b } c"); }')
    labels = []

    def walk(node):
        labels.append(node.label)
        for c in node.children:
            walk(c)

    walk(tree.root)
    assert '"a { b } c"' in labels


def test_parse_rejects_empty_and_tolerates_broken_code():
    with pytest.raises(ParseError):
        parse_source("")
    with pytest.raises(ParseError):
        parse_source("/* nothing but a comment */")
    # buggy student code still parses; a stray closer becomes a leaf
    assert parse_source("int main() { return 0;").size == 8
    assert parse_source("} int x;").root.children[0].label == "}"


def test_ted_identity_and_simple_edits():
    base = parse_source("int main(){return 0;}")
    assert ted(base, base) == 0
    relabel = parse_source("int main(){return 1;}")
    assert ted(base, relabel) == 1
    insert = parse_source("int main(){int x; return 0;}")
    assert ted(base, insert) == 3  # int x ;
    assert ted(insert, base) == 3  # deletion is symmetric in cost


def test_ted_matches_oracle_exhaustively():
    # every ordered labeled tree pair with at most 6 nodes combined
    pool = {n: all_trees(n, "ab") for n in range(1, 6)}
    checked = 0
    for na in range(1, 6):
        for nb in range(1, 6 - na + 1):
            for t1 in pool[na]:
                for t2 in pool[nb]:
                    expected = ted_oracle(t1, t2)
                    got = ted(_to_node(t1), _to_node(t2))
                    assert got == expected, (
                        f"ted mismatch: got {got}, oracle {expected}"
                    )
                    checked += 1
    assert checked > 3000


def test_ted_metric_axioms_on_random_trees():
    rng = random.Random(20260826)
    trees = [_to_node(random_tree(rng, 10, "abc")) for _ in range(60)]
    for i in range(0, 60, 3):
        a, b, c = trees[i], trees[i + 1], trees[i + 2]
        dab, dba = ted(a, b), ted(b, a)
        assert dab == dba  # symmetry under unit costs
        assert ted(a, a) == 0
        assert dab + ted(b, c) >= ted(a, c)  # triangle inequality
