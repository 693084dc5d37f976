"""Exception types shared across the toolkit."""


class SplError(Exception):
    """Base class for every domain error raised by this package."""


class SchemaError(SplError):
    """A payload or declaration does not match the expected shape."""


class UnboundPlaceholder(SplError):
    def __init__(self, name: str):
        super().__init__(f"placeholder {name!r} has neither a value nor a default")
        self.name = name


class UnknownArtifact(SplError):
    def __init__(self, artifact_id: str):
        super().__init__(f"unknown artifact {artifact_id!r}")
        self.artifact_id = artifact_id


class UnknownArtifactRef(SplError):
    """A feature references an artifact id that was never declared."""


class DuplicateName(SplError):
    """Two artifacts or two features were declared under the same name."""


class DuplicateFeature(SplError):
    def __init__(self, name: str):
        super().__init__(f"duplicate feature {name!r}")
        self.name = name


class UnknownFeature(SplError):
    def __init__(self, name: str):
        super().__init__(f"unknown feature {name!r}")
        self.name = name


class UnknownAttribute(SplError):
    def __init__(self, feature: "str | None", attribute: str):
        owner = feature if feature is not None else "<global>"
        super().__init__(f"unknown attribute {attribute!r} on {owner}")
        self.feature = feature
        self.attribute = attribute


class RootToggle(SplError):
    """The root node is active in every configuration and cannot be toggled."""


class PhaseError(SplError):
    """A message arrived in a session phase that does not allow it."""


class NotValidated(SplError):
    """Commit was requested without a fresh valid verdict for the configuration."""


class MdlSyntaxError(SplError):
    """Parse failure in a module or composition source file."""

    def __init__(self, line: int, col: int, expected: str, found: str, source: "str | None" = None):
        where = f"{source}:{line}:{col}" if source else f"{line}:{col}"
        super().__init__(f"{where}: expected {expected}, found {found}")
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        self.source = source


class DuplicateModule(SplError):
    def __init__(self, name: str):
        super().__init__(f"module {name!r} declared more than once")
        self.name = name


class ExtractionError(SplError):
    """The declared modules cannot be turned into a coherent feature payload."""


class MissingVisitFeature(SplError):
    """Product generation needs exactly one active tree-visit feature."""


class InconsistentCommit(SplError):
    """The committed configuration cannot be materialized as source files."""
