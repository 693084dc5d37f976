"""Technology-agnostic product-line data model.

Atoms are flat key->value maps: the minimal tokens that artifacts provide
and require.  A value is either a literal, a local placeholder (``$name``,
filled from the owning artifact's variables) or a global placeholder
(``@name``, filled from the product-line-wide table).  Resolving an atom
substitutes every placeholder and yields a canonical string form that the
rest of the system treats as the atom's identity.

All types in this module are immutable values; they can be shared across
threads without coordination.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import SchemaError, UnboundPlaceholder, UnknownArtifact

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.:\-]*\Z")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a; deterministic across runs and platforms."""
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def _escape(part: str) -> str:
    # \, ; and = are escaped so that canonicalization stays a bijection.
    return part.replace("\\", "\\\\").replace(";", "\\;").replace("=", "\\=")


def canonicalize(entries: Mapping[str, str]) -> str:
    """Render a placeholder-free entry map as its unique canonical string."""
    return ";".join(f"{_escape(k)}={_escape(v)}" for k, v in sorted(entries.items()))


def placeholder(value: str) -> tuple[str, str] | None:
    """Classify an atom value.

    Returns ``("local", name)`` for ``$name``, ``("global", name)`` for
    ``@name``, and ``None`` for literals.  A ``$``/``@`` prefix whose
    remainder is not a valid identifier is an ordinary literal.
    """
    if value[:1] == "$" and IDENT_RE.match(value[1:]):
        return ("local", value[1:])
    if value[:1] == "@" and IDENT_RE.match(value[1:]):
        return ("global", value[1:])
    return None


@dataclass(frozen=True)
class AtomTemplate:
    """An atom that may still contain attribute placeholders."""

    entries: tuple[tuple[str, str], ...]  # sorted by key

    @classmethod
    def from_mapping(cls, entries: Mapping[str, str]) -> "AtomTemplate":
        if not entries:
            raise SchemaError("an atom needs at least one entry")
        for key, value in entries.items():
            if not isinstance(key, str) or not IDENT_RE.match(key):
                raise SchemaError(f"bad atom key {key!r}")
            if not isinstance(value, str):
                raise SchemaError(f"atom value for {key!r} must be a string")
        return cls(tuple(sorted(entries.items())))

    def as_dict(self) -> dict[str, str]:
        return dict(self.entries)

    def placeholders(self) -> Iterable[tuple[str, str]]:
        for _, value in self.entries:
            found = placeholder(value)
            if found:
                yield found

    def raw_canonical(self) -> str:
        """Canonical rendering with placeholders left verbatim (sorting key)."""
        return canonicalize(self.as_dict())


@dataclass(frozen=True)
class ResolvedAtom:
    """A placeholder-free atom with its canonical form and 64-bit id."""

    entries: tuple[tuple[str, str], ...]
    canonical: str
    id: int

    @classmethod
    def from_entries(cls, entries: Mapping[str, str]) -> "ResolvedAtom":
        canonical = canonicalize(entries)
        return cls(tuple(sorted(entries.items())), canonical, fnv1a64(canonical.encode("utf-8")))


def atom_id(atom: ResolvedAtom) -> int:
    """Stable 64-bit identity of a resolved atom (pure function of canonical)."""
    return fnv1a64(atom.canonical.encode("utf-8"))


@dataclass(frozen=True)
class Group:
    """A named group of alternative atoms inside an any/one requirement."""

    group_id: str
    atoms: tuple[AtomTemplate, ...]

    def __post_init__(self):
        if not self.group_id:
            raise SchemaError("group id must be non-empty")
        if not self.atoms:
            raise SchemaError(f"group {self.group_id!r} needs at least one atom")


@dataclass(frozen=True)
class RequirementSet:
    all_atoms: tuple[AtomTemplate, ...] = ()
    not_atoms: tuple[AtomTemplate, ...] = ()
    any_groups: tuple[Group, ...] = ()
    one_groups: tuple[Group, ...] = ()

    def __post_init__(self):
        for groups, kind in ((self.any_groups, "any"), (self.one_groups, "one")):
            ids = [g.group_id for g in groups]
            if len(ids) != len(set(ids)):
                raise SchemaError(f"duplicate {kind} group id in requirement set")

    def templates(self) -> Iterable[AtomTemplate]:
        yield from self.all_atoms
        yield from self.not_atoms
        for group in self.any_groups + self.one_groups:
            yield from group.atoms


@dataclass(frozen=True)
class Artifact:
    """A concrete code unit: what it provides, requires and parameterizes."""

    id: str
    tags: frozenset[str] = frozenset()
    provides: tuple[AtomTemplate, ...] = ()
    requires: RequirementSet = RequirementSet()
    variables: tuple[tuple[str, str], ...] = ()  # (name, default), sorted

    def __post_init__(self):
        if not self.id:
            raise SchemaError("artifact id must be non-empty")
        declared = {name for name, _ in self.variables}
        for template in tuple(self.provides) + tuple(self.requires.templates()):
            for kind, name in template.placeholders():
                if kind == "local" and name not in declared:
                    raise SchemaError(
                        f"artifact {self.id!r} uses ${name} without declaring it"
                    )

    def variable_defaults(self) -> dict[str, str]:
        return dict(self.variables)


@dataclass(frozen=True)
class Feature:
    """A named group of artifacts; its dependencies are their union."""

    name: str
    artifact_ids: tuple[str, ...] = ()
    tags: frozenset[str] = frozenset()


def effective_tags(feature: Feature, artifacts: Mapping[str, Artifact]) -> frozenset[str]:
    """Declared feature tags unioned with the tags of its artifacts."""
    tags = set(feature.tags)
    for artifact_id in feature.artifact_ids:
        artifact = artifacts.get(artifact_id)
        if artifact is None:
            raise UnknownArtifact(artifact_id)
        tags.update(artifact.tags)
    return frozenset(tags)


@dataclass(frozen=True)
class GlobalTable:
    """Product-line-wide attributes: per-name default plus current value."""

    defaults: tuple[tuple[str, str], ...] = ()
    values: tuple[tuple[str, str], ...] = ()

    @classmethod
    def from_defaults(cls, defaults: Mapping[str, str]) -> "GlobalTable":
        pairs = tuple(sorted(defaults.items()))
        return cls(pairs, pairs)

    def lookup(self, name: str) -> str:
        current = dict(self.values)
        if name in current:
            return current[name]
        defaults = dict(self.defaults)
        if name in defaults:
            return defaults[name]
        raise UnboundPlaceholder(name)

    def has(self, name: str) -> bool:
        return name in dict(self.defaults)

    def with_value(self, name: str, value: str) -> "GlobalTable":
        updated = dict(self.values)
        updated[name] = value
        return GlobalTable(self.defaults, tuple(sorted(updated.items())))

    def current(self) -> dict[str, str]:
        merged = dict(self.defaults)
        merged.update(dict(self.values))
        return merged


@dataclass(frozen=True)
class Configuration:
    """Active feature set plus the local and global attribute state."""

    active: frozenset[str] = frozenset()
    locals: tuple[tuple[tuple[str, str], str], ...] = ()  # ((feature, var), value)
    globals: GlobalTable = GlobalTable()

    def local_values(self) -> dict[tuple[str, str], str]:
        return dict(self.locals)

    def with_active(self, active: Iterable[str]) -> "Configuration":
        return Configuration(frozenset(active), self.locals, self.globals)

    def with_local(self, feature: str, name: str, value: str) -> "Configuration":
        updated = self.local_values()
        updated[(feature, name)] = value
        return Configuration(self.active, tuple(sorted(updated.items())), self.globals)

    def with_global(self, name: str, value: str) -> "Configuration":
        return Configuration(self.active, self.locals, self.globals.with_value(name, value))


def resolve_atom(
    template: AtomTemplate,
    locals_map: Mapping[str, str],
    globals_table: GlobalTable,
) -> ResolvedAtom:
    """Substitute every placeholder, then canonicalize and hash.

    ``locals_map`` already merges the owning artifact's declared defaults
    with any configured overrides; ``$name`` lookups that miss it raise
    :class:`UnboundPlaceholder`, as do ``@name`` lookups outside the
    global table.
    """
    resolved: dict[str, str] = {}
    for key, value in template.entries:
        found = placeholder(value)
        if found is None:
            resolved[key] = value
        elif found[0] == "local":
            if found[1] not in locals_map:
                raise UnboundPlaceholder(found[1])
            resolved[key] = locals_map[found[1]]
        else:
            resolved[key] = globals_table.lookup(found[1])
    return ResolvedAtom.from_entries(resolved)


def _group_key(multi_artifact: bool, artifact_id: str, group_id: str) -> str:
    # Groups from different artifacts must keep distinct ids; a feature
    # backed by a single artifact keeps the declared ids untouched.
    return f"{artifact_id}/{group_id}" if multi_artifact else group_id


def feature_dependencies(
    feature: Feature, artifacts: Mapping[str, Artifact]
) -> tuple[tuple[AtomTemplate, ...], RequirementSet]:
    """Union of the provides/requires of the feature's artifacts (template form)."""
    provides: list[AtomTemplate] = []
    all_atoms: list[AtomTemplate] = []
    not_atoms: list[AtomTemplate] = []
    any_groups: list[Group] = []
    one_groups: list[Group] = []
    multi = len(feature.artifact_ids) > 1
    for artifact_id in feature.artifact_ids:
        artifact = artifacts.get(artifact_id)
        if artifact is None:
            raise UnknownArtifact(artifact_id)
        provides.extend(artifact.provides)
        all_atoms.extend(artifact.requires.all_atoms)
        not_atoms.extend(artifact.requires.not_atoms)
        for group in artifact.requires.any_groups:
            any_groups.append(Group(_group_key(multi, artifact_id, group.group_id), group.atoms))
        for group in artifact.requires.one_groups:
            one_groups.append(Group(_group_key(multi, artifact_id, group.group_id), group.atoms))
    requires = RequirementSet(
        tuple(all_atoms), tuple(not_atoms), tuple(any_groups), tuple(one_groups)
    )
    return tuple(provides), requires


@dataclass(frozen=True)
class ResolvedFeature:
    """A feature's dependency sets with every atom resolved to canonical form."""

    name: str
    provides: frozenset[str]
    all_atoms: frozenset[str]
    not_atoms: frozenset[str]
    any_groups: tuple[tuple[str, frozenset[str]], ...]
    one_groups: tuple[tuple[str, frozenset[str]], ...]


def artifact_locals(
    feature: Feature, artifact: Artifact, config: Configuration
) -> dict[str, str]:
    """Variable table for resolving one artifact inside one owning feature."""
    table = artifact.variable_defaults()
    overrides = config.local_values()
    for name in table:
        value = overrides.get((feature.name, name))
        if value is not None:
            table[name] = value
    return table


def resolve_feature(
    feature: Feature, artifacts: Mapping[str, Artifact], config: Configuration
) -> ResolvedFeature:
    provides: set[str] = set()
    all_atoms: set[str] = set()
    not_atoms: set[str] = set()
    any_groups: dict[str, set[str]] = {}
    one_groups: dict[str, set[str]] = {}
    multi = len(feature.artifact_ids) > 1
    for artifact_id in feature.artifact_ids:
        artifact = artifacts.get(artifact_id)
        if artifact is None:
            raise UnknownArtifact(artifact_id)
        locals_map = artifact_locals(feature, artifact, config)
        for template in artifact.provides:
            provides.add(resolve_atom(template, locals_map, config.globals).canonical)
        for template in artifact.requires.all_atoms:
            all_atoms.add(resolve_atom(template, locals_map, config.globals).canonical)
        for template in artifact.requires.not_atoms:
            not_atoms.add(resolve_atom(template, locals_map, config.globals).canonical)
        for groups, target in (
            (artifact.requires.any_groups, any_groups),
            (artifact.requires.one_groups, one_groups),
        ):
            for group in groups:
                key = _group_key(multi, artifact_id, group.group_id)
                members = target.setdefault(key, set())
                for template in group.atoms:
                    members.add(resolve_atom(template, locals_map, config.globals).canonical)
    return ResolvedFeature(
        feature.name,
        frozenset(provides),
        frozenset(all_atoms),
        frozenset(not_atoms),
        tuple((gid, frozenset(members)) for gid, members in sorted(any_groups.items())),
        tuple((gid, frozenset(members)) for gid, members in sorted(one_groups.items())),
    )


def resolve_features(
    features: Iterable[Feature],
    artifacts: Mapping[str, Artifact],
    config: Configuration,
) -> dict[str, ResolvedFeature]:
    return {f.name: resolve_feature(f, artifacts, config) for f in features}


def providers_index(resolved: Mapping[str, ResolvedFeature]) -> dict[str, frozenset[str]]:
    """Map each provided canonical atom to the set of features providing it."""
    index: dict[str, set[str]] = {}
    for rf in resolved.values():
        for canonical in rf.provides:
            index.setdefault(canonical, set()).add(rf.name)
    return {canonical: frozenset(names) for canonical, names in index.items()}
