"""Module containing the domain exception hierarchy."""


class FacePnPError(Exception):
    """Base class of every error raised by the facepnp services."""


class NonPositiveDepth(FacePnPError):
    """A transformed point lies on or behind the camera plane."""

    def __init__(self, index: int) -> None:
        """The initializer of the error.

        Args:
            index (int): Index of the first offending point.
        """
        super().__init__(f"Point {index} has non-positive camera depth")
        self.index = index


class DegenerateLandmarks(FacePnPError):
    """The landmark set cannot define a frontalization warp."""


class DegenerateConfiguration(FacePnPError):
    """The correspondences do not determine a unique pose."""


class SingularHessian(FacePnPError):
    """The cost Hessian at the solution cannot be inverted."""


class NotConverged(FacePnPError):
    """An operation required a converged PnP solution."""


class InconsistentVertexCount(FacePnPError):
    """Meshes of a collection, or a mesh and a model, disagree on N."""


class RankDeficient(FacePnPError):
    """The requested number of components exceeds the data rank."""

    def __init__(self, rank: int, requested: int) -> None:
        """The initializer of the error.

        Args:
            rank (int): The numerical rank of the centered data.
            requested (int): The requested number of components.
        """
        super().__init__(f"Data rank {rank} is below the requested {requested} components")
        self.rank = rank
        self.requested = requested


class DimensionMismatch(FacePnPError):
    """Two inputs that must agree in size do not."""


class UnprojectableScene(FacePnPError):
    """No sampled pose kept the mesh inside the image frame."""


class DatasetError(FacePnPError):
    """A dataset or model file cannot be read or written."""


class FormatVersionMismatch(DatasetError):
    """A file was written with an unsupported format version."""


class ChecksumMismatch(DatasetError):
    """A payload does not match its recorded sha256 digest."""


class DivergenceError(FacePnPError):
    """A finetune trial's loss grew past the divergence guard."""
