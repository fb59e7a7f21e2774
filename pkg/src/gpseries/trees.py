"""Trees of elementary transformations.

A tree is rooted at an ambient signature; every edge carries one elementary
transformation, so each leaf determines a chain nu_1 o ... o nu_N (root to
leaf).  Engines attach their results to leaf payloads.  Branch enumeration,
serialization, and the numeric covering check all operate on these trees.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from .series import Rational, Signature
from .transforms import (
    INF,
    NEG_INF,
    ElementaryTransform,
    chain_sigs,
    forward_chain,
    inverse_chain,
    transform_from_json,
)


@dataclass
class TreeNode:
    """One node; ``transform`` is the edge from the parent (None at the root).

    ``payload`` holds engine results (JSON-compatible values only)."""

    transform: Optional[ElementaryTransform] = None
    children: list["TreeNode"] = field(default_factory=list)
    payload: dict = field(default_factory=dict)

    def is_leaf(self) -> bool:
        return not self.children

    def add_child(self, transform: ElementaryTransform) -> "TreeNode":
        child = TreeNode(transform=transform)
        self.children.append(child)
        return child


@dataclass
class AdmissibleTree:
    sig: Signature
    root: TreeNode = field(default_factory=TreeNode)

    def branches(self) -> Iterator[tuple[list[ElementaryTransform], TreeNode]]:
        """Depth-first, left-to-right enumeration of (chain, leaf) pairs."""

        def walk(node: TreeNode, chain: list):
            if node.is_leaf():
                yield list(chain), node
                return
            for child in node.children:
                chain.append(child.transform)
                yield from walk(child, chain)
                chain.pop()

        yield from walk(self.root, [])

    def leaves(self) -> list[TreeNode]:
        return [leaf for _, leaf in self.branches()]

    def height(self) -> int:
        def depth(node: TreeNode) -> int:
            if node.is_leaf():
                return 0
            return 1 + max(depth(c) for c in node.children)

        return depth(self.root)

    def leaf_sig(self, chain: Sequence[ElementaryTransform]) -> Signature:
        return chain_sigs(chain, self.sig)[-1]


# -- lambda palettes ---------------------------------------------------------


@dataclass(frozen=True)
class LambdaPalette:
    """Finite parameter sets used when spawning a blow-up chart family.

    ``positive`` lists the finite nonzero magnitudes; charts over a y-source
    (parameter ranging over all of Q) also get the mirrored negatives."""

    positive: tuple = (Fraction(1, 2), Fraction(1), Fraction(2))

    def nonneg(self, extra: Sequence[Fraction] = ()) -> list:
        """0, the positive palette plus nonnegative extras, then inf."""
        vals = sorted({Fraction(v) for v in self.positive}
                      | {Fraction(v) for v in extra if Fraction(v) > 0})
        return [Fraction(0)] + vals + [INF]

    def signed(self, extra: Sequence[Fraction] = ()) -> list:
        """0, +-palette and nonzero extras, then +-inf."""
        mags = {Fraction(v) for v in self.positive}
        vals = sorted({s * v for v in mags for s in (1, -1)}
                      | {Fraction(v) for v in extra if Fraction(v) != 0})
        return [Fraction(0)] + vals + [INF, NEG_INF]


DEFAULT_PALETTE = LambdaPalette()


def palette_from_spec(text: str) -> LambdaPalette:
    """Parse a comma-separated list of positive rationals, e.g. "1/2,1,2"."""
    vals = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        v = Fraction(piece)
        if v <= 0:
            raise ValueError(f"palette entries must be positive, got {piece}")
        vals.append(v)
    if not vals:
        raise ValueError("empty palette")
    return LambdaPalette(tuple(sorted(set(vals))))


# -- serialization -----------------------------------------------------------


def tree_to_json(tree: AdmissibleTree) -> dict:
    def node_json(node: TreeNode) -> dict:
        d: dict = {}
        if node.transform is not None:
            d["transform"] = node.transform.to_json()
        if node.payload:
            d["payload"] = node.payload
        if node.children:
            d["children"] = [node_json(c) for c in node.children]
        return d

    return {"sig": list(tree.sig), "root": node_json(tree.root)}


def tree_from_json(data: dict, precision: Rational = None) -> AdmissibleTree:
    def node_from(d: dict) -> TreeNode:
        t = None
        if "transform" in d:
            t = transform_from_json(d["transform"], precision)
        node = TreeNode(transform=t, payload=dict(d.get("payload", {})))
        node.children = [node_from(c) for c in d.get("children", [])]
        return node

    m, n = data["sig"]
    return AdmissibleTree(Signature(m, n), node_from(data["root"]))


# -- covering check ----------------------------------------------------------


def sample_points(
    sig: Signature, count: int, seed: int, radius: float = 0.25
) -> list[list[float]]:
    """Deterministic sample of ambient points: x in (0, r], y in [-r, r]."""
    rng = random.Random(seed)
    pts = []
    for _ in range(count):
        xs = [rng.uniform(1e-6, radius) for _ in range(sig.m)]
        ys = [rng.uniform(-radius, radius) for _ in range(sig.n)]
        pts.append(xs + ys)
    return pts


def point_in_domain(p: Sequence[float], sig: Signature) -> bool:
    return all(float(p[i]) >= 0 for i in range(sig.m))


def covering_fraction(
    tree: AdmissibleTree,
    points: Sequence[Sequence[float]],
    tol: float = 1e-9,
    accept: Optional[Callable[[Sequence[float], Signature, TreeNode], bool]] = None,
) -> float:
    """Fraction of sample points hit by some branch.

    A point p is covered when a branch's chain admits a numeric preimage q
    with all leaf x-coordinates nonnegative (and passing ``accept`` when
    given) whose forward image returns to p within ``tol``."""
    branches = list(tree.branches())
    if not points:
        return 1.0
    covered = 0
    for p in points:
        for chain, leaf in branches:
            q = inverse_chain(chain, list(p), tree.sig)
            if q is None:
                continue
            leaf_sig = tree.leaf_sig(chain)
            if not point_in_domain(q, leaf_sig):
                continue
            if accept is not None and not accept(q, leaf_sig, leaf):
                continue
            back = forward_chain(chain, q, tree.sig)
            err = max(abs(float(a) - float(b)) for a, b in zip(back, p))
            if err <= tol:
                covered += 1
                break
    return covered / len(points)
