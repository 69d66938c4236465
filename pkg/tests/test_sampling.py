import numpy as np
import pytest
from hypothesis import given

from astvec.ast_core import leaf_count, node, vocabulary
from astvec.sampling import (
    build_training_set,
    corrupt,
    dump_samples,
    extract_samples,
)

from test_ast_core import trees


def _chain(*names):
    tree = node(names[-1])
    for name in reversed(names[:-1]):
        tree = node(name, tree)
    return tree


class TestExtract:
    def test_leaf_gives_nothing(self):
        assert extract_samples(node("ID")) == []

    def test_two_leaves_half_half(self):
        tree = node("BinaryOp", node("ID"), node("Constant"))
        (s,) = extract_samples(tree)
        assert s.parent.name == "BinaryOp"
        assert [c.name for c in s.children] == ["ID", "Constant"]
        assert s.coefficients == (0.5, 0.5)

    def test_unbalanced_leaves(self):
        # children carrying 2 and 3 leaves -> 0.4 / 0.6
        left = node("ExprList", node("ID"), node("ID"))
        right = node("ExprList", node("ID"), node("ID"), node("ID"))
        tree = node("FuncCall", left, right)
        s = extract_samples(tree)[0]
        assert s.coefficients == (0.4, 0.6)

    def test_preorder_one_per_nonleaf(self):
        tree = node(
            "Root",
            node("Decl", node("TypeDecl", node("IdentifierType"))),
            node("Constant"),
        )
        samples = extract_samples(tree)
        assert [s.parent.name for s in samples] == ["Root", "Decl", "TypeDecl"]

    @given(trees())
    def test_coefficient_invariants(self, tree):
        for s in extract_samples(tree):
            assert abs(sum(s.coefficients) - 1.0) < 1e-12
            assert all(l > 0 for l in s.coefficients)
        nonleaf = sum(1 for n in tree.walk() if n.children)
        assert len(extract_samples(tree)) == nonleaf

    def test_single_child_coefficient_exact(self):
        s = extract_samples(_chain("Return", "ID"))[0]
        assert s.coefficients == (1.0,)

    @given(trees())
    def test_min_coefficient_bound(self, tree):
        for n, s in zip((x for x in tree.walk() if x.children), extract_samples(tree)):
            assert min(s.coefficients) >= 1.0 / leaf_count(n) - 1e-12


class TestCorrupt:
    @pytest.fixture
    def sample(self):
        tree = node("BinaryOp", node("ID"), node("Constant"))
        return extract_samples(tree)[0]

    def test_differs_in_exactly_one_slot(self, sample):
        rng = np.random.default_rng(7)
        for _ in range(200):
            neg = corrupt(sample, rng)
            original = (
                sample.parent
                if neg.corrupted_position == 0
                else sample.children[neg.corrupted_position - 1]
            )
            assert neg.new_symbol != original
            assert neg.coefficients == sample.coefficients
            # untouched slots identical
            slots_base = [sample.parent, *sample.children]
            slots_neg = [neg.parent, *neg.children]
            diffs = [i for i, (a, b) in enumerate(zip(slots_base, slots_neg)) if a != b]
            assert diffs == [neg.corrupted_position]

    def test_position_uniform(self, sample):
        rng = np.random.default_rng(123)
        hits = np.zeros(3)
        n = 10_000
        for _ in range(n):
            hits[corrupt(sample, rng).corrupted_position] += 1
        assert np.all(np.abs(hits / n - 1 / 3) < 0.02)

    def test_replacement_uniform_over_others(self, sample):
        rng = np.random.default_rng(5)
        v = len(vocabulary())
        counts = np.zeros(v)
        n = 40_000
        for _ in range(n):
            neg = corrupt(sample, rng)
            counts[neg.new_symbol.id] += 1
        # each symbol is a valid replacement in some slot; none dominates
        assert counts.max() / n < 3.0 / (v - 1)

    def test_seed_reproducible(self, sample):
        a = [corrupt(sample, np.random.default_rng(9)) for _ in range(50)]
        b = [corrupt(sample, np.random.default_rng(9)) for _ in range(50)]
        assert a == b


class TestBuildTrainingSet:
    def test_empty(self):
        assert build_training_set([]) == []

    def test_single_program(self, corpus):
        assert build_training_set(corpus[:1]) == extract_samples(corpus[0].ast)

    def test_total_count_recount(self, corpus):
        # oracle: independent per-tree traversal counting non-leaf nodes
        expected = sum(
            sum(1 for n in p.ast.walk() if n.children) for p in corpus
        )
        assert len(build_training_set(corpus)) == expected


def test_dump_samples_format():
    tree = node("BinaryOp", node("ID"), node("Constant"))
    text = dump_samples(extract_samples(tree))
    assert text == "BinaryOp\tID:0.500000,Constant:0.500000\n"
