"""Configuration validity: fixpoint semantics, diagnosis and fix hints.

A feature is valid when it provides at least one atom, every required atom
is provided by some other valid feature, each any/one group has a member
provided by some other valid feature, a one group has at most one member
atom present across the active set, and none of its undesired atoms is
provided by another active feature.  Mutually dependent features are legal:
validity is the greatest fixpoint, computed by removing violating features
from the active set until nothing changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import RootToggle, UnknownFeature
from .extraction import CONCRETE, ROOT, FeatureModel
from .model import (
    Artifact,
    Configuration,
    ResolvedFeature,
    providers_index,
    resolve_features,
)

ACTIVATE = "activate"
DEACTIVATE = "deactivate"


def _providers_of(index: Mapping[str, frozenset[str]], atom: str) -> frozenset[str]:
    return index.get(atom, frozenset())


def valid_subset(
    resolved: Mapping[str, ResolvedFeature], active: frozenset[str] | set[str]
) -> frozenset[str]:
    """Greatest set of mutually supporting features within ``active``.

    ``resolved`` must cover every name in ``active``; names missing from it
    (abstract nodes and the like) are ignored.
    """
    act = frozenset(n for n in active if n in resolved)
    active_providers = providers_index({n: resolved[n] for n in act})

    def statically_ok(name: str) -> bool:
        rf = resolved[name]
        if not rf.provides:
            return False
        for _, members in rf.one_groups:
            present = sum(1 for m in members if _providers_of(active_providers, m))
            if present > 1:
                return False
        for atom in rf.not_atoms:
            if _providers_of(active_providers, atom) - {name}:
                return False
        return True

    current = frozenset(n for n in act if statically_ok(n))
    while True:
        live = providers_index({n: resolved[n] for n in current})

        def supported(name: str) -> bool:
            rf = resolved[name]
            for atom in rf.all_atoms:
                if not _providers_of(live, atom) - {name}:
                    return False
            for _, members in rf.any_groups + rf.one_groups:
                if not any(_providers_of(live, m) - {name} for m in members):
                    return False
            return True

        kept = frozenset(n for n in current if supported(n))
        if kept == current:
            return kept
        current = kept


def _active_concrete(config: Configuration, model: FeatureModel) -> frozenset[str]:
    return frozenset(config.active) & model.concrete_names()


def valid_set(
    config: Configuration, model: FeatureModel, artifacts: Mapping[str, Artifact]
) -> frozenset[str]:
    """Names of the active concrete features that are valid in this config."""
    active = _active_concrete(config, model)
    features = [model.nodes[n].feature for n in active]
    resolved = resolve_features(features, artifacts, config)
    return valid_subset(resolved, active)


def exists(
    atom: str,
    config: Configuration,
    model: FeatureModel,
    artifacts: Mapping[str, Artifact],
) -> bool:
    """An atom exists when some valid feature provides it (canonical form)."""
    active = _active_concrete(config, model)
    features = [model.nodes[n].feature for n in active]
    resolved = resolve_features(features, artifacts, config)
    valid = valid_subset(resolved, active)
    return any(atom in resolved[n].provides for n in valid)


@dataclass(frozen=True)
class Problem:
    """One unmet requirement with the features that could address it."""

    atoms: tuple[str, ...]
    providers: tuple[str, ...]
    action: str
    # reason atoms per provider, for ranking suggestions
    provider_atoms: tuple[tuple[str, tuple[str, ...]], ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    # feature -> kind (ALL/NOT/ANY/ONE) -> atom-or-group-id -> Problem
    problems: Mapping[str, Mapping[str, Mapping[str, Problem]]]


def _problem(
    atoms: list[str],
    action: str,
    candidates: Mapping[str, frozenset[str]],
    requirer: str,
    pool: frozenset[str] | None = None,
) -> Problem:
    """Build a problem whose providers supply any of ``atoms``.

    ``pool`` restricts candidate providers (the active set for deactivate
    hints); the requirer itself is never suggested.
    """
    per_provider: dict[str, set[str]] = {}
    for atom in atoms:
        for name in candidates.get(atom, frozenset()):
            if name == requirer:
                continue
            if pool is not None and name not in pool:
                continue
            per_provider.setdefault(name, set()).add(atom)
    return Problem(
        tuple(sorted(atoms)),
        tuple(sorted(per_provider)),
        action,
        tuple((n, tuple(sorted(a))) for n, a in sorted(per_provider.items())),
    )


def validate_configuration(
    config: Configuration, model: FeatureModel, artifacts: Mapping[str, Artifact]
) -> ValidationReport:
    """Diagnose every active concrete feature that is not in the valid set."""
    active = _active_concrete(config, model)
    resolved = resolve_features(model.concrete_features(), artifacts, config)
    valid = valid_subset(resolved, active)
    all_providers = providers_index(resolved)
    active_providers = providers_index({n: resolved[n] for n in active})

    problems: dict[str, dict[str, dict[str, Problem]]] = {}
    for name in sorted(active - valid):
        rf = resolved[name]
        found: dict[str, dict[str, Problem]] = {}
        for atom in sorted(rf.all_atoms):
            if not _providers_of(active_providers, atom) & (valid - {name}):
                found.setdefault("ALL", {})[atom] = _problem(
                    [atom], ACTIVATE, all_providers, name
                )
        for atom in sorted(rf.not_atoms):
            offenders = _providers_of(active_providers, atom) - {name}
            if offenders:
                found.setdefault("NOT", {})[atom] = _problem(
                    [atom], DEACTIVATE, active_providers, name, pool=active
                )
        for group_id, members in rf.any_groups:
            if not any(_providers_of(active_providers, m) & (valid - {name}) for m in members):
                found.setdefault("ANY", {})[group_id] = _problem(
                    sorted(members), ACTIVATE, all_providers, name
                )
        for group_id, members in rf.one_groups:
            present = [m for m in members if _providers_of(active_providers, m)]
            if len(present) > 1:
                found.setdefault("ONE", {})[group_id] = _problem(
                    sorted(present), DEACTIVATE, active_providers, name, pool=active
                )
            elif not any(_providers_of(active_providers, m) & (valid - {name}) for m in members):
                found.setdefault("ONE", {})[group_id] = _problem(
                    sorted(members), ACTIVATE, all_providers, name
                )
        problems[name] = found
    return ValidationReport(not problems, problems)


@dataclass(frozen=True)
class Suggestion:
    feature: str
    action: str
    atom: str


def suggest_fix(report: ValidationReport) -> list[Suggestion]:
    """Flatten the report into toggles, most problems addressed first."""
    addressed: dict[tuple[str, str], set[tuple[str, str, str]]] = {}
    reasons: dict[tuple[str, str], set[str]] = {}
    for feature, kinds in report.problems.items():
        for kind, entries in kinds.items():
            for key, problem in entries.items():
                for provider, atoms in problem.provider_atoms:
                    slot = (provider, problem.action)
                    addressed.setdefault(slot, set()).add((feature, kind, key))
                    reasons.setdefault(slot, set()).update(atoms)
    ranked = sorted(
        addressed,
        key=lambda slot: (-len(addressed[slot]), slot[0], slot[1]),
    )
    return [Suggestion(name, action, min(reasons[(name, action)])) for name, action in ranked]


def _ancestors(model: FeatureModel, name: str) -> list[str]:
    chain = []
    node = model.nodes[name]
    while node.parent is not None:
        chain.append(node.parent)
        node = model.nodes[node.parent]
    return chain


def _subtree(model: FeatureModel, name: str) -> set[str]:
    collected = {name}
    frontier = [name]
    while frontier:
        current = frontier.pop()
        for child in model.children(current):
            collected.add(child)
            frontier.append(child)
    return collected


def toggle_activation(
    config: Configuration,
    model: FeatureModel,
    artifacts: Mapping[str, Artifact],
    name: str,
) -> frozenset[str]:
    """Toggle one feature and return the resulting active set.

    Activation pulls in all ancestors, then transitively auto-activates any
    feature that is the unique provider of an all-required atom of a newly
    activated feature.  Deactivating an abstract node drops its whole
    subtree; deactivating a concrete node drops only itself.
    """
    node = model.nodes.get(name)
    if node is None:
        raise UnknownFeature(name)
    if node.kind == ROOT:
        raise RootToggle(f"{name!r} cannot be toggled")
    active = set(config.active)

    if name in active:
        if node.kind == CONCRETE:
            active.discard(name)
        else:
            active -= _subtree(model, name)
        return frozenset(active)

    newly_concrete: list[str] = []

    def activate(target: str) -> None:
        for n in [target, *_ancestors(model, target)]:
            if n not in active:
                active.add(n)
                if model.nodes[n].kind == CONCRETE:
                    newly_concrete.append(n)

    activate(name)
    resolved = resolve_features(model.concrete_features(), artifacts, config)
    providers = providers_index(resolved)
    queue = list(newly_concrete)
    while queue:
        current = queue.pop(0)
        for atom in sorted(resolved[current].all_atoms):
            candidates = providers.get(atom, frozenset()) - {current}
            if len(candidates) == 1:
                (sole,) = candidates
                if sole not in active:
                    before = len(newly_concrete)
                    activate(sole)
                    queue.extend(newly_concrete[before:])
    return frozenset(active)
