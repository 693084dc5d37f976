"""Feature-model construction.

The model is a tree backbone plus a superimposed dependency-edge graph.
The tree is grown bottom-up from feature tags: the most frequent shared
tag among the children of a node is repeatedly promoted to an abstract
node, then the procedure recurses.  Dependency edges are recomputed from
the current attribute values and never touch the tree.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .errors import DuplicateFeature, UnknownAttribute, UnknownFeature
from .model import (
    Artifact,
    Configuration,
    Feature,
    ResolvedFeature,
    effective_tags,
    providers_index,
    resolve_features,
)

ROOT = "root"
ABSTRACT = "abstract"
CONCRETE = "concrete"


@dataclass(frozen=True)
class DepEdge:
    """Requirer -> provider edge for one resolved atom."""

    src: str
    dst: str
    kind: str  # all | not | any | one
    atom: str  # canonical string
    group: str | None = None

    def sort_key(self):
        return (self.src, self.dst, self.kind, self.atom, self.group or "")


@dataclass(frozen=True)
class Marker:
    """A required atom that no other feature can provide (dead end)."""

    kind: str
    atom: str
    group: str | None = None

    def sort_key(self):
        return (self.kind, self.atom, self.group or "")


@dataclass(frozen=True)
class Node:
    name: str
    kind: str
    parent: str | None
    tags: frozenset[str] = frozenset()  # residual tags after promotion
    feature: Feature | None = None  # concrete nodes only
    promoted_tag: str | None = None  # abstract nodes only


@dataclass(frozen=True)
class FeatureModel:
    nodes: Mapping[str, Node]
    root: str
    edges: frozenset[DepEdge] = frozenset()
    unsatisfiable: Mapping[str, tuple[Marker, ...]] = field(default_factory=dict)

    def children(self, name: str) -> list[str]:
        return sorted(n.name for n in self.nodes.values() if n.parent == name)

    def concrete_features(self) -> list[Feature]:
        return [n.feature for n in self.nodes.values() if n.kind == CONCRETE]

    def concrete_names(self) -> frozenset[str]:
        return frozenset(n.name for n in self.nodes.values() if n.kind == CONCRETE)

    def tree_signature(self) -> tuple:
        """Hashable identity of the tree part (nodes, parents, residual tags)."""
        return tuple(
            (n.name, n.kind, n.parent, tuple(sorted(n.tags)))
            for n in sorted(self.nodes.values(), key=lambda n: n.name)
        )


def build_feature_tree(
    features: Iterable[Feature],
    artifacts: Mapping[str, Artifact] | None = None,
) -> FeatureModel:
    """Grow the tree backbone from feature tags.

    Every feature starts as a child of a tagless root.  At each node, the
    tag shared by the most children (ties broken by lexicographically
    smallest tag) is promoted to an abstract child and the matching
    children move under it, losing that tag.  When no tag repeats the
    procedure recurses into each child, so the result is deterministic and
    independent of declaration order.
    """
    features = list(features)
    names = [f.name for f in features]
    if len(names) != len(set(names)):
        seen: set[str] = set()
        for name in names:
            if name in seen:
                raise DuplicateFeature(name)
            seen.add(name)
    taken = set(names)

    def allocate(base: str) -> str:
        name = base
        serial = 2
        while name in taken:
            name = f"{base}#{serial}"
            serial += 1
        taken.add(name)
        return name

    root = allocate(ROOT)
    parent: dict[str, str | None] = {root: None}
    children: dict[str, list[str]] = {root: []}
    tags: dict[str, set[str]] = {}
    kind: dict[str, str] = {root: ROOT}
    promoted: dict[str, str] = {}
    payload: dict[str, Feature] = {}

    for feature in features:
        parent[feature.name] = root
        children[root].append(feature.name)
        children[feature.name] = []
        tags[feature.name] = set(
            effective_tags(feature, artifacts) if artifacts is not None else feature.tags
        )
        kind[feature.name] = CONCRETE
        payload[feature.name] = feature

    def promote(node: str) -> None:
        while True:
            counts = Counter(t for c in children[node] for t in tags.get(c, ()))
            repeated = [t for t, n in counts.items() if n > 1]
            if not repeated:
                break
            best_count = max(counts[t] for t in repeated)
            tag = min(t for t in repeated if counts[t] == best_count)
            abstract = allocate(tag)
            parent[abstract] = node
            children[abstract] = []
            tags[abstract] = set()
            kind[abstract] = ABSTRACT
            promoted[abstract] = tag
            moved = [c for c in children[node] if tag in tags.get(c, ())]
            for c in moved:
                tags[c].discard(tag)
                parent[c] = abstract
                children[abstract].append(c)
            children[node] = [c for c in children[node] if c not in moved]
            children[node].append(abstract)
        for c in sorted(children[node]):
            promote(c)

    promote(root)

    nodes = {
        name: Node(
            name,
            kind[name],
            parent[name],
            frozenset(tags.get(name, ())),
            payload.get(name),
            promoted.get(name),
        )
        for name in parent
    }
    return FeatureModel(nodes, root)


def _edges_and_markers(
    model: FeatureModel,
    artifacts: Mapping[str, Artifact],
    config: Configuration,
    resolved: Mapping[str, ResolvedFeature] | None = None,
) -> tuple[frozenset[DepEdge], dict[str, tuple[Marker, ...]]]:
    if resolved is None:
        resolved = resolve_features(model.concrete_features(), artifacts, config)
    providers = providers_index(resolved)
    edges: set[DepEdge] = set()
    markers: dict[str, tuple[Marker, ...]] = {}

    def others(atom: str, requirer: str) -> frozenset[str]:
        return providers.get(atom, frozenset()) - {requirer}

    for rf in resolved.values():
        dead: list[Marker] = []
        for atom in rf.all_atoms:
            sources = others(atom, rf.name)
            edges.update(DepEdge(rf.name, dst, "all", atom) for dst in sources)
            if not sources:
                dead.append(Marker("all", atom))
        for atom in rf.not_atoms:
            edges.update(DepEdge(rf.name, dst, "not", atom) for dst in others(atom, rf.name))
        for kind, groups in (("any", rf.any_groups), ("one", rf.one_groups)):
            for group_id, members in groups:
                for atom in sorted(members):
                    sources = others(atom, rf.name)
                    edges.update(
                        DepEdge(rf.name, dst, kind, atom, group_id) for dst in sources
                    )
                    if not sources:
                        dead.append(Marker(kind, atom, group_id))
        if dead:
            markers[rf.name] = tuple(sorted(dead, key=Marker.sort_key))
    return frozenset(edges), markers


def derive_dependency_edges(
    model: FeatureModel,
    artifacts: Mapping[str, Artifact],
    config: Configuration,
) -> frozenset[DepEdge]:
    """Edges from every concrete requirer to every other concrete provider."""
    edges, _ = _edges_and_markers(model, artifacts, config)
    return edges


def with_dependencies(
    model: FeatureModel,
    artifacts: Mapping[str, Artifact],
    config: Configuration,
    resolved: Mapping[str, ResolvedFeature] | None = None,
) -> FeatureModel:
    """New snapshot with the dependency graph recomputed for this config."""
    edges, markers = _edges_and_markers(model, artifacts, config, resolved)
    return replace(model, edges=edges, unsatisfiable=markers)


def attribute_exists(
    model: FeatureModel,
    artifacts: Mapping[str, Artifact],
    config: Configuration,
    feature: str | None,
    attribute: str,
) -> bool:
    if feature is None:
        return config.globals.has(attribute)
    node = model.nodes.get(feature)
    if node is None:
        raise UnknownFeature(feature)
    if node.kind != CONCRETE:
        return False
    return any(
        attribute in artifacts[a].variable_defaults()
        for a in node.feature.artifact_ids
        if a in artifacts
    )


def recompute_on_attribute_change(
    model: FeatureModel,
    artifacts: Mapping[str, Artifact],
    config: Configuration,
    feature: str | None,
    attribute: str,
) -> tuple[FeatureModel, frozenset[DepEdge], frozenset[DepEdge]]:
    """Re-derive the edge graph after an attribute edit.

    ``config`` already carries the new value.  Returns the new snapshot plus
    the (added, removed) edge sets; tree nodes are untouched.
    """
    if not attribute_exists(model, artifacts, config, feature, attribute):
        raise UnknownAttribute(feature, attribute)
    updated = with_dependencies(model, artifacts, config)
    added = updated.edges - model.edges
    removed = model.edges - updated.edges
    return updated, frozenset(added), frozenset(removed)
