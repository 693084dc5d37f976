"""Session state machine and wire formats.

Every message is one UTF-8 JSON object with a ``method`` field naming one
of: features, featureModel, updateAttribute, activate, validate, commit.
Responses echo a method plus ``ok``; the response to ``features`` is the
``featureModel`` payload.  All lists are sorted so that identical requests
always produce byte-identical responses.
"""

from __future__ import annotations

import json
from typing import Any, Callable, Mapping

from .errors import (
    DuplicateName,
    NotValidated,
    PhaseError,
    SchemaError,
    SplError,
    UnknownArtifactRef,
    UnknownAttribute,
    UnknownFeature,
)
from .extraction import (
    CONCRETE,
    DepEdge,
    FeatureModel,
    attribute_exists,
    build_feature_tree,
    recompute_on_attribute_change,
    with_dependencies,
)
from .model import (
    Artifact,
    AtomTemplate,
    Configuration,
    Feature,
    GlobalTable,
    Group,
    RequirementSet,
)
from .validation import (
    suggest_fix,
    toggle_activation,
    validate_configuration,
)

EMPTY = "Empty"
LOADED = "Loaded"
CONFIGURING = "Configuring"
COMMITTED = "Committed"

METHODS = ("features", "updateAttribute", "activate", "validate", "commit")


def dumps(payload: Any) -> str:
    """Canonical wire serialization: sorted keys, no whitespace."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaError(message)


def _parse_atom(raw: Any, where: str) -> AtomTemplate:
    _require(isinstance(raw, dict), f"{where}: an atom must be a flat object")
    for key, value in raw.items():
        _require(isinstance(key, str) and isinstance(value, str), f"{where}: atom entries must map strings to strings")
    return AtomTemplate.from_mapping(raw)


def _parse_atom_list(raw: Any, where: str) -> tuple[AtomTemplate, ...]:
    _require(isinstance(raw, list), f"{where}: expected a list of atoms")
    return tuple(_parse_atom(a, where) for a in raw)


def _parse_groups(raw: Any, where: str) -> tuple[Group, ...]:
    _require(isinstance(raw, list), f"{where}: expected a list of groups")
    groups = []
    for entry in raw:
        _require(isinstance(entry, dict) and isinstance(entry.get("group"), str), f"{where}: a group needs a string 'group' id")
        groups.append(Group(entry["group"], _parse_atom_list(entry.get("atoms", []), where)))
    return tuple(groups)


def _parse_str_map(raw: Any, where: str) -> dict[str, str]:
    _require(isinstance(raw, dict), f"{where}: expected an object")
    for key, value in raw.items():
        _require(isinstance(key, str) and key != "", f"{where}: keys must be non-empty strings")
        _require(isinstance(value, str), f"{where}: value for {key!r} must be a string")
    return dict(raw)


def parse_features_payload(
    payload: Mapping[str, Any]
) -> tuple[dict[str, Artifact], list[Feature], GlobalTable]:
    """Validate and load a ``features`` message into model objects."""
    _require(isinstance(payload.get("artifacts"), list), "payload needs an 'artifacts' list")
    _require(isinstance(payload.get("features"), list), "payload needs a 'features' list")
    globals_table = GlobalTable.from_defaults(_parse_str_map(payload.get("globals", {}), "globals"))

    artifacts: dict[str, Artifact] = {}
    for raw in payload["artifacts"]:
        _require(isinstance(raw, dict), "artifact entries must be objects")
        artifact_id = raw.get("id")
        _require(isinstance(artifact_id, str) and artifact_id != "", "artifact needs a non-empty string id")
        if artifact_id in artifacts:
            raise DuplicateName(f"artifact {artifact_id!r} declared twice")
        tags = raw.get("tags", [])
        _require(isinstance(tags, list) and all(isinstance(t, str) for t in tags), f"artifact {artifact_id}: tags must be strings")
        requires_raw = raw.get("requires", {})
        _require(isinstance(requires_raw, dict), f"artifact {artifact_id}: requires must be an object")
        where = f"artifact {artifact_id}"
        requires = RequirementSet(
            _parse_atom_list(requires_raw.get("all", []), where),
            _parse_atom_list(requires_raw.get("not", []), where),
            _parse_groups(requires_raw.get("any", []), where),
            _parse_groups(requires_raw.get("one", []), where),
        )
        artifact = Artifact(
            artifact_id,
            frozenset(tags),
            _parse_atom_list(raw.get("provides", []), where),
            requires,
            tuple(sorted(_parse_str_map(raw.get("variables", {}), where).items())),
        )
        for template in tuple(artifact.provides) + tuple(requires.templates()):
            for kind, name in template.placeholders():
                if kind == "global" and not globals_table.has(name):
                    raise SchemaError(f"artifact {artifact_id} uses @{name} but the global table lacks it")
        artifacts[artifact_id] = artifact

    features: list[Feature] = []
    seen: set[str] = set()
    for raw in payload["features"]:
        _require(isinstance(raw, dict), "feature entries must be objects")
        name = raw.get("name")
        _require(isinstance(name, str) and name != "", "feature needs a non-empty string name")
        if name in seen:
            raise DuplicateName(f"feature {name!r} declared twice")
        seen.add(name)
        refs = raw.get("artifacts")
        _require(isinstance(refs, list) and refs, f"feature {name}: needs at least one artifact")
        for ref in refs:
            if not isinstance(ref, str) or ref not in artifacts:
                raise UnknownArtifactRef(f"feature {name} references unknown artifact {ref!r}")
        tags = raw.get("tags", [])
        _require(isinstance(tags, list) and all(isinstance(t, str) for t in tags), f"feature {name}: tags must be strings")
        features.append(Feature(name, tuple(refs), frozenset(tags)))
    return artifacts, features, globals_table


def edge_payload(edge: DepEdge) -> dict[str, Any]:
    return {"from": edge.src, "to": edge.dst, "kind": edge.kind, "atom": edge.atom, "group": edge.group}


def _sorted_edges(edges) -> list[dict[str, Any]]:
    return [edge_payload(e) for e in sorted(edges, key=DepEdge.sort_key)]


class Session:
    """Single-user configuration session; requests are handled one at a time."""

    def __init__(self, on_commit: Callable[[dict], None] | None = None):
        self.phase = EMPTY
        self.artifacts: dict[str, Artifact] = {}
        self.features: list[Feature] = []
        self.model: FeatureModel | None = None
        self.config: Configuration | None = None
        self.verdict: bool | None = None
        self.on_commit = on_commit

    # -- dispatch ---------------------------------------------------------

    def dispatch(self, envelope: Any) -> dict[str, Any]:
        method = envelope.get("method") if isinstance(envelope, dict) else None
        try:
            if not isinstance(envelope, dict) or not isinstance(method, str):
                raise SchemaError("a request must be an object with a 'method' field")
            if method not in METHODS:
                raise SchemaError(f"unknown method {method!r}")
            handler = getattr(self, "_handle_" + method.lower())
            return handler(envelope)
        except SplError as err:
            return {
                "method": method if isinstance(method, str) else None,
                "ok": False,
                "error": type(err).__name__,
                "message": str(err),
            }

    def _need_model(self) -> None:
        if self.model is None:
            raise PhaseError("no product line loaded yet")

    # -- handlers ---------------------------------------------------------

    def _handle_features(self, envelope: Mapping[str, Any]) -> dict[str, Any]:
        artifacts, features, globals_table = parse_features_payload(envelope)
        model = build_feature_tree(features, artifacts)
        config = Configuration(frozenset({model.root}), (), globals_table)
        model = with_dependencies(model, artifacts, config)
        self.artifacts = artifacts
        self.features = features
        self.model = model
        self.config = config
        self.phase = LOADED
        self.verdict = None
        return self.feature_model_payload()

    def _handle_updateattribute(self, envelope: Mapping[str, Any]) -> dict[str, Any]:
        self._need_model()
        feature = envelope.get("feature")
        attribute = envelope.get("attribute")
        value = envelope.get("value")
        _require(feature is None or isinstance(feature, str), "'feature' must be a string or null")
        _require(isinstance(attribute, str), "'attribute' must be a string")
        _require(isinstance(value, str), "'value' must be a string")
        if not attribute_exists(self.model, self.artifacts, self.config, feature, attribute):
            raise UnknownAttribute(feature, attribute)
        config = (
            self.config.with_global(attribute, value)
            if feature is None
            else self.config.with_local(feature, attribute, value)
        )
        model, added, removed = recompute_on_attribute_change(
            self.model, self.artifacts, config, feature, attribute
        )
        self.model = model
        self.config = config
        self.phase = CONFIGURING
        self.verdict = None
        return {
            "method": "updateAttribute",
            "ok": True,
            "added": _sorted_edges(added),
            "removed": _sorted_edges(removed),
        }

    def _handle_activate(self, envelope: Mapping[str, Any]) -> dict[str, Any]:
        self._need_model()
        name = envelope.get("feature")
        _require(isinstance(name, str), "'feature' must be a string")
        active = toggle_activation(self.config, self.model, self.artifacts, name)
        self.config = self.config.with_active(active)
        self.phase = CONFIGURING
        self.verdict = None
        return {"method": "activate", "ok": True, "active": sorted(active)}

    def _handle_validate(self, envelope: Mapping[str, Any]) -> dict[str, Any]:
        self._need_model()
        report = validate_configuration(self.config, self.model, self.artifacts)
        suggestions = suggest_fix(report)
        self.verdict = report.valid
        problems = {
            feature: {
                kind: {
                    key: {"providers": list(problem.providers), "action": problem.action}
                    for key, problem in entries.items()
                }
                for kind, entries in kinds.items()
            }
            for feature, kinds in report.problems.items()
        }
        return {
            "method": "validate",
            "ok": True,
            "valid": report.valid,
            "problems": problems,
            "suggestions": [
                {"feature": s.feature, "action": s.action, "atom": s.atom} for s in suggestions
            ],
        }

    def _handle_commit(self, envelope: Mapping[str, Any]) -> dict[str, Any]:
        self._need_model()
        if self.verdict is not True:
            raise NotValidated("the current configuration has no fresh valid verdict")
        payload = self.commit_payload()
        self.phase = COMMITTED
        if self.on_commit is not None:
            self.on_commit(payload)
        return {"method": "commit", "ok": True, **payload}

    # -- payload builders -------------------------------------------------

    def _node_attributes(self, name: str) -> dict[str, str]:
        node = self.model.nodes[name]
        if node.kind != CONCRETE:
            return {}
        merged: dict[str, str] = {}
        overrides = self.config.local_values()
        for artifact_id in node.feature.artifact_ids:
            for var, default in self.artifacts[artifact_id].variables:
                merged[var] = overrides.get((name, var), default)
        return merged

    def feature_model_payload(self) -> dict[str, Any]:
        self._need_model()
        nodes = []
        for name in sorted(self.model.nodes):
            node = self.model.nodes[name]
            nodes.append(
                {
                    "name": node.name,
                    "kind": node.kind,
                    "parent": node.parent,
                    "tags": sorted(node.tags),
                    "attributes": self._node_attributes(name),
                    "unsatisfiable": [
                        {"kind": m.kind, "atom": m.atom, "group": m.group}
                        for m in self.model.unsatisfiable.get(name, ())
                    ],
                }
            )
        return {
            "method": "featureModel",
            "ok": True,
            "nodes": nodes,
            "dependencies": _sorted_edges(self.model.edges),
            "globals": self.config.globals.current(),
            "active": sorted(self.config.active),
        }

    def commit_payload(self) -> dict[str, Any]:
        locals_out: dict[str, dict[str, str]] = {}
        for name in sorted(self.config.active):
            node = self.model.nodes.get(name)
            if node is None or node.kind != CONCRETE:
                continue
            attributes = self._node_attributes(name)
            if attributes:
                locals_out[name] = attributes
        return {
            "active": sorted(self.config.active),
            "locals": locals_out,
            "globals": self.config.globals.current(),
        }

    # -- batch loading ----------------------------------------------------

    def load_configuration(self, payload: Mapping[str, Any]) -> None:
        """Install a recorded configuration (commit-payload shape) wholesale.

        Ancestors of listed features and the root are activated implicitly,
        mirroring what interactive toggling would have produced.
        """
        self._need_model()
        active = set()
        for name in payload.get("active", []):
            node = self.model.nodes.get(name)
            if node is None:
                raise UnknownFeature(name)
            active.add(name)
            while node.parent is not None:
                active.add(node.parent)
                node = self.model.nodes[node.parent]
        active.add(self.model.root)
        config = self.config.with_active(active)
        for feature, table in _parse_locals(payload.get("locals", {})).items():
            for attribute, value in table.items():
                if not attribute_exists(self.model, self.artifacts, config, feature, attribute):
                    raise UnknownAttribute(feature, attribute)
                config = config.with_local(feature, attribute, value)
        for name, value in _parse_str_map(payload.get("globals", {}), "globals").items():
            if not config.globals.has(name):
                raise UnknownAttribute(None, name)
            config = config.with_global(name, value)
        self.config = config
        self.model = with_dependencies(self.model, self.artifacts, config)
        self.phase = CONFIGURING
        self.verdict = None


def _parse_locals(raw: Any) -> dict[str, dict[str, str]]:
    _require(isinstance(raw, dict), "locals must map features to attribute tables")
    return {name: _parse_str_map(table, f"locals[{name}]") for name, table in raw.items()}
