"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Feature vectors of mismatched length were compared.

    Usually a sign that rows were framed against different candidate
    regions and therefore partitioned into different block counts.
    """


class InvalidConfigError(ValueError):
    """A configuration value or key is outside its legal domain."""


class InvalidInputError(ValueError):
    """An input image or data file is missing, undecodable, or malformed."""


class NoContentError(ValueError):
    """An operation that needs page content received an empty component set."""


class PageMismatchError(ValueError):
    """Strict evaluation found detection pages absent from the ground truth."""


class LayoutError(ValueError):
    """A synthetic page block cannot be placed inside the page bounds."""
