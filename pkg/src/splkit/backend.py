"""Reference client backend.

Turns a workspace of ``.mdl`` modules into a ``features`` payload and, on
commit, materializes the configuration as composed slice and language
source files.  Extraction rules:

* each module with a grammar fragment becomes a syntax artifact/feature
  that provides an atom per defined nonterminal and requires every
  right-hand-side nonterminal the module does not define itself;
* each role becomes a semantic artifact/feature providing a role atom and
  any declared structure variants, requiring exactly one variant per used
  structure and exactly one tree-visit strategy, with ``priority`` and
  ``order`` attributes;
* three synthetic features offer the visit strategies;
* every nonterminal is a global attribute defaulting to its own name, so
  renaming it rewires the dependency graph.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    DuplicateModule,
    ExtractionError,
    InconsistentCommit,
    MissingVisitFeature,
)
from .mdl import MdlModule, MdlSyntaxError, parse_module
from .model import canonicalize

VISIT_KINDS = ("preorder", "postorder", "interleaved")

_EMPTY_REQUIRES = {"all": [], "not": [], "any": [], "one": []}


def _atom_sort_key(atom: dict[str, str]) -> str:
    return canonicalize(atom)


def extract_features(modules: Iterable[MdlModule]) -> dict:
    """Build the ``features`` message payload for a set of parsed modules."""
    modules = sorted(modules, key=lambda m: m.name)
    seen: set[str] = set()
    for module in modules:
        if module.name in seen:
            raise DuplicateModule(module.name)
        seen.add(module.name)

    variants: dict[str, set[str]] = {}
    nonterminals: set[str] = set()
    for module in modules:
        for production in module.productions:
            nonterminals.add(production.lhs)
            nonterminals.update(s for kind, s in production.rhs if kind == "nt")
        for role in module.roles:
            for structure, variant in role.provides:
                variants.setdefault(structure, set()).add(variant)

    artifacts: list[dict] = []
    features: list[dict] = []

    for module in modules:
        if module.productions:
            defined = sorted({p.lhs for p in module.productions})
            needed = sorted(
                {s for p in module.productions for kind, s in p.rhs if kind == "nt"}
                - set(defined)
            )
            artifact_id = f"syntax:{module.name}"
            artifacts.append(
                {
                    "id": artifact_id,
                    "tags": sorted(module.tags),
                    "provides": [{"syntax": f"@{n}"} for n in defined],
                    "requires": {
                        "all": [{"syntax": f"@{n}"} for n in needed],
                        "not": [],
                        "any": [],
                        "one": [],
                    },
                    "variables": {},
                }
            )
            features.append({"name": module.name, "artifacts": [artifact_id], "tags": ["syntax"]})
        for role in module.roles:
            role_name = f"{module.name}.{role.name}"
            provides = [{"role": role_name}] + [
                {"struct": s, "variant": v} for s, v in sorted(set(role.provides))
            ]
            one = []
            for structure in sorted(set(role.uses)):
                declared = sorted(variants.get(structure, ()))
                if not declared:
                    raise ExtractionError(
                        f"role {role_name} uses $${structure} but no module declares a variant for it"
                    )
                one.append(
                    {
                        "group": f"struct:{structure}",
                        "atoms": [{"struct": structure, "variant": v} for v in declared],
                    }
                )
            one.append({"group": "visit", "atoms": [{"visit": k} for k in sorted(VISIT_KINDS)]})
            artifact_id = f"role:{role_name}"
            artifacts.append(
                {
                    "id": artifact_id,
                    "tags": sorted(module.tags),
                    "provides": sorted(provides, key=_atom_sort_key),
                    "requires": {"all": [], "not": [], "any": [], "one": one},
                    "variables": {"order": "0", "priority": "100"},
                }
            )
            features.append({"name": role_name, "artifacts": [artifact_id], "tags": ["semantics"]})

    for kind in sorted(VISIT_KINDS):
        artifact_id = f"visit:{kind}"
        artifacts.append(
            {
                "id": artifact_id,
                "tags": [],
                "provides": [{"visit": kind}],
                "requires": dict(_EMPTY_REQUIRES),
                "variables": {},
            }
        )
        features.append({"name": artifact_id, "artifacts": [artifact_id], "tags": ["visit"]})

    names = [f["name"] for f in features]
    if len(names) != len(set(names)):
        duplicate = sorted({n for n in names if names.count(n) > 1})
        raise ExtractionError(f"feature name collision: {', '.join(duplicate)}")

    return {
        "method": "features",
        "artifacts": sorted(artifacts, key=lambda a: a["id"]),
        "features": sorted(features, key=lambda f: f["name"]),
        "globals": {n: n for n in sorted(nonterminals)},
    }


def scan_workspace(directory: "str | os.PathLike[str]") -> dict:
    """Parse every ``*.mdl`` file under ``directory`` and extract features."""
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"not a readable directory: {root}")
    modules = []
    for path in sorted(root.rglob("*.mdl"), key=lambda p: str(p)):
        text = path.read_text(encoding="utf-8")
        try:
            modules.append(parse_module(text, source=str(path)))
        except MdlSyntaxError:
            raise
    return extract_features(modules)


def _slice_basename(module_name: str) -> str:
    return module_name.split(".")[-1] + "Slice"


def _slice_text(name: str, module: MdlModule, roles: list[str]) -> str:
    lines = [f"slice {name} {{"]
    if module.productions:
        lines.append(f"  concrete syntax from {module.name}")
    for role in roles:
        lines.append(f"  module {module.name} with role {role}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _language_text(
    name: str,
    slice_names: list[str],
    renames: list[tuple[str, str]],
    ordered_roles: list[str],
    visit: str,
) -> str:
    lines = [f"language {name} {{", "  slices"]
    lines.extend(f"    {s}" for s in slice_names)
    if renames:
        lines.append("  rename {")
        lines.extend(f"    {old} => {new}" for old, new in renames)
        lines.append("  }")
    if ordered_roles:
        lines.append(f"  roles syntax < {' : '.join(ordered_roles)} >")
    lines.append(f"  visit {visit}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def generate_product(
    commit: Mapping,
    modules: Iterable[MdlModule],
    out_dir: "str | os.PathLike[str]",
    language_name: str = "Product",
) -> list[Path]:
    """Write one slice file per active module plus one language file.

    ``commit`` is the commit payload (active features, locals, globals).
    Output is byte-deterministic; files are written atomically.
    """
    active = set(commit.get("active", []))
    locals_ = commit.get("locals", {})
    globals_ = commit.get("globals", {})
    modules = sorted(modules, key=lambda m: m.name)

    active_visits = [k for k in VISIT_KINDS if f"visit:{k}" in active]
    if not active_visits:
        raise MissingVisitFeature("no visit feature is active")
    if len(active_visits) > 1:
        raise InconsistentCommit(f"more than one visit feature active: {', '.join(active_visits)}")
    visit = active_visits[0]

    slices: list[tuple[str, MdlModule, list[str]]] = []
    role_priority: dict[str, int] = {}
    for module in modules:
        syntax_active = bool(module.productions) and module.name in active
        active_roles = [r.name for r in module.roles if f"{module.name}.{r.name}" in active]
        for role in active_roles:
            feature = f"{module.name}.{role}"
            if module.productions and module.name not in active:
                raise InconsistentCommit(
                    f"role {feature} is active but syntax feature {module.name} is not"
                )
            raw = locals_.get(feature, {}).get("priority", "100")
            try:
                priority = int(raw)
            except (TypeError, ValueError):
                raise InconsistentCommit(f"priority of {feature} is not an integer: {raw!r}")
            role_priority[role] = min(role_priority.get(role, priority), priority)
        if syntax_active or active_roles:
            slices.append((_slice_basename(module.name), module, active_roles))

    renames = [(old, new) for old, new in sorted(globals_.items()) if new != old]
    ordered_roles = sorted(role_priority, key=lambda r: (role_priority[r], r))
    slice_names = sorted(name for name, _, _ in slices)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    files = [(f"{name}.mdlc", _slice_text(name, module, roles)) for name, module, roles in slices]
    files.append(
        (f"{language_name}.mdlc", _language_text(language_name, slice_names, renames, ordered_roles, visit))
    )
    for filename, text in files:
        target = out / filename
        staging = out / (filename + ".tmp")
        staging.write_text(text, encoding="utf-8")
        staging.replace(target)
        written.append(target)
    return sorted(written)
