"""Exception hierarchy shared across the package."""


class FrameForgeError(Exception):
    """Base class for all library errors."""


class InvalidMatrix(FrameForgeError):
    """Coxeter matrix data is malformed or has entries outside the supported range."""


class CapExceeded(FrameForgeError):
    """Group or root enumeration exceeded its cap (group infinite or too large)."""


class NotAReflection(FrameForgeError):
    """An element index passed as a reflection does not correspond to one."""


class DegenerateForm(FrameForgeError):
    """The bilinear form is not positive definite (ambient group not finite)."""


class DifferentAmbient(FrameForgeError):
    """Two reflection subgroups do not share the same ambient system."""


class PanelTooSmall(FrameForgeError):
    """A panel contains fewer than two chambers; the complex is corrupt."""


class MixedWall(FrameForgeError):
    """A wall carries both thick and thin panels; input is not a building."""


class InvalidSide(FrameForgeError):
    """Folding side must be +1 or -1."""


class Disconnected(FrameForgeError):
    """No gallery joins the two chambers."""


class TypeMismatch(FrameForgeError):
    """Coxeter types of the operands do not match."""


class NotThick(FrameForgeError):
    """Operation requires a thick building."""


class EmbeddingNotNormalizable(FrameForgeError):
    """A reflection subgroup embedding cannot be aligned with the required type."""


class InconsistentTyping(FrameForgeError):
    """Panel typing could not be propagated consistently; input is not a building."""


class NotInvariant(FrameForgeError):
    """A translation group is not invariant under the spherical group."""


class NotThickBoundary(FrameForgeError):
    """The boundary building of the base model is not thick."""


class BadEmbedding(FrameForgeError):
    """The factor group does not embed into the ambient group as required."""


class UnsupportedModel(FrameForgeError):
    """The model kind is not supported by this operation."""


class BaseMismatch(FrameForgeError):
    """A Weyl simplex is not based at the given point."""


class UnpresentedModel(FrameForgeError):
    """The model has no presented product structure; reduction is out of scope."""


class RankUnsupported(FrameForgeError):
    """Rendering supports rank 2 and 3 only."""


class ParseError(FrameForgeError):
    """A document failed to parse; carries a location string."""

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
