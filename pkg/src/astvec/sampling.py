"""Training-sample extraction and negative-sample corruption.

Every non-leaf node yields one sample: its kind, its children's kinds, and
per-child coefficients equal to each child's share of the parent's leaves.
A negative sample replaces exactly one symbol (parent or any child) with a
different one drawn uniformly; the coefficients are kept, since corruption
swaps a symbol without touching the tree shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ast_core import AstNode, LabeledProgram, NodeKind, leaf_count, vocabulary


@dataclass(frozen=True)
class TrainingSample:
    parent: NodeKind
    children: tuple[NodeKind, ...]
    coefficients: tuple[float, ...]

    def __post_init__(self):
        assert len(self.children) == len(self.coefficients) >= 1


@dataclass(frozen=True)
class NegativeSample:
    base: TrainingSample
    corrupted_position: int  # 0 = parent, 1..n = child index
    new_symbol: NodeKind

    @property
    def parent(self) -> NodeKind:
        return self.new_symbol if self.corrupted_position == 0 else self.base.parent

    @property
    def children(self) -> tuple[NodeKind, ...]:
        if self.corrupted_position == 0:
            return self.base.children
        kids = list(self.base.children)
        kids[self.corrupted_position - 1] = self.new_symbol
        return tuple(kids)

    @property
    def coefficients(self) -> tuple[float, ...]:
        return self.base.coefficients


def extract_samples(ast: AstNode) -> list[TrainingSample]:
    """One sample per non-leaf node, in preorder."""
    samples: list[TrainingSample] = []
    for node in ast.walk():
        if node.is_leaf():
            continue
        child_leaves = [leaf_count(c) for c in node.children]
        total = sum(child_leaves)
        samples.append(
            TrainingSample(
                parent=node.kind,
                children=tuple(c.kind for c in node.children),
                coefficients=tuple(lc / total for lc in child_leaves),
            )
        )
    return samples


def build_training_set(corpus: list[LabeledProgram]) -> list[TrainingSample]:
    samples: list[TrainingSample] = []
    for program in corpus:
        samples.extend(extract_samples(program.ast))
    return samples


def corrupt(sample: TrainingSample, rng: np.random.Generator) -> NegativeSample:
    """Replace one uniformly chosen slot with a different uniformly chosen symbol."""
    vocab = vocabulary()
    n = len(sample.children)
    position = int(rng.integers(0, n + 1))
    original = sample.parent if position == 0 else sample.children[position - 1]
    # uniform over the V-1 other symbols
    draw = int(rng.integers(0, len(vocab) - 1))
    if draw >= original.id:
        draw += 1
    return NegativeSample(
        base=sample, corrupted_position=position, new_symbol=vocab[draw]
    )


def dump_samples(samples: list[TrainingSample]) -> str:
    """Debug format: parent<TAB>child:coeff,child:coeff,..."""
    lines = []
    for s in samples:
        pairs = ",".join(
            f"{c.name}:{l:.6f}" for c, l in zip(s.children, s.coefficients)
        )
        lines.append(f"{s.parent.name}\t{pairs}")
    return "\n".join(lines) + ("\n" if lines else "")
