"""Exception types shared across the package."""


class DyadT1Error(Exception):
    """Base class for all package errors."""


class OutOfTree(DyadT1Error):
    """An interval (or ancestor request) falls outside the finite tree."""


class LeafHasNoChildren(DyadT1Error):
    """Children were requested for an interval at the deepest level."""


class SingularLeaf(DyadT1Error):
    """A leaf matrix (or derived average) is too close to singular."""


class ShapeMismatch(DyadT1Error):
    """Dimensions or depths of two objects do not agree."""


class BadParams(DyadT1Error):
    """Invalid parameters for a generator or constructor."""
