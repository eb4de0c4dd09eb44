"""Module containing canonical mesh, landmark and PCA domain models."""

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from facepnp.core.domain.geometry import FloatArray, coerce_points


def _frozen_vector(values: object, name: str) -> FloatArray:
    vector = np.array(values, dtype=np.float64)
    if vector.ndim != 1:
        raise ValueError(f"{name} must be a vector, got shape {vector.shape}")
    if not np.all(np.isfinite(vector)):
        raise ValueError(f"{name} contains non-finite values")
    vector.flags.writeable = False
    return vector


class CanonicalMesh(BaseModel):
    """Model representing a face as N ordered canonical vertices (mm).

    Vertex order is the correspondence contract with the landmark set and
    is never permuted.
    """
    vertices: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("vertices", mode="before")
    @classmethod
    def validate_vertices(cls, v: object) -> FloatArray:
        """Coerce the vertices into a read-only (N, 3) array."""
        return coerce_points(v, 3, "vertices")

    @classmethod
    def from_flat(cls, flat: FloatArray) -> "CanonicalMesh":
        """Build a mesh from its (3N,) x1, y1, z1, x2, ... layout."""
        return cls(vertices=np.asarray(flat, dtype=np.float64).reshape(-1, 3))

    @property
    def n_vertices(self) -> int:
        """Number of vertices N."""
        return self.vertices.shape[0]

    def flat(self) -> FloatArray:
        """Return the (3N,) row-major layout used by the PCA model."""
        return self.vertices.reshape(-1)


class LandmarkSet(BaseModel):
    """Model representing N predicted landmarks with per-point uncertainty.

    The uncertainty is stored through its logarithm, sigma_i = exp(log_sigma_i),
    so it is positive for every parameter value.
    """
    mu: np.ndarray
    log_sigma: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("mu", mode="before")
    @classmethod
    def validate_mu(cls, v: object) -> FloatArray:
        """Coerce the means into a read-only (N, 2) array."""
        return coerce_points(v, 2, "mu")

    @field_validator("log_sigma", mode="before")
    @classmethod
    def validate_log_sigma(cls, v: object) -> FloatArray:
        """Coerce the raw uncertainty parameters into a read-only vector."""
        return _frozen_vector(v, "log_sigma")

    @model_validator(mode="after")
    def validate_lengths(self) -> "LandmarkSet":
        """Check that means and uncertainties describe the same points."""
        if self.mu.shape[0] != self.log_sigma.shape[0]:
            raise ValueError(
                f"mu has {self.mu.shape[0]} points but log_sigma has {self.log_sigma.shape[0]}"
            )
        return self

    @classmethod
    def from_sigma(cls, mu: object, sigma: object) -> "LandmarkSet":
        """Build a landmark set from explicit positive sigmas.

        Raises:
            ValueError: If a sigma is not positive.
        """
        sigma = np.asarray(sigma, dtype=np.float64)
        if np.any(sigma <= 0):
            raise ValueError("sigma must be positive")
        return cls(mu=mu, log_sigma=np.log(sigma))

    @classmethod
    def unit(cls, mu: object) -> "LandmarkSet":
        """Build a landmark set with every sigma frozen at 1."""
        mu = np.asarray(mu, dtype=np.float64)
        return cls(mu=mu, log_sigma=np.zeros(mu.shape[0]))

    @property
    def sigma(self) -> FloatArray:
        """The per-point uncertainty sigma_i (px)."""
        return np.exp(self.log_sigma)

    @property
    def n_points(self) -> int:
        """Number of landmarks N."""
        return self.mu.shape[0]


class PcaCoeffs(BaseModel):
    """Model representing a K-vector of shape coefficients (mm, basis units)."""
    values: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("values", mode="before")
    @classmethod
    def validate_values(cls, v: object) -> FloatArray:
        """Coerce the coefficients into a read-only vector."""
        return _frozen_vector(v, "values")

    @property
    def k(self) -> int:
        """Number of coefficients K."""
        return self.values.shape[0]


class PcaModel(BaseModel):
    """Model representing a linear shape space mesh = mean + basis @ coeffs.

    Attributes:
        mean: (3N,) mean mesh in the flat layout.
        basis: (3N, K) matrix with orthonormal columns.
        component_scales: (K,) singular values / sqrt(count - 1) (mm).
    """
    mean: np.ndarray
    basis: np.ndarray
    component_scales: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("mean", "component_scales", mode="before")
    @classmethod
    def validate_vectors(cls, v: object) -> FloatArray:
        """Coerce the mean and scales into read-only vectors."""
        return _frozen_vector(v, "vector")

    @field_validator("basis", mode="before")
    @classmethod
    def validate_basis(cls, v: object) -> FloatArray:
        """Coerce the basis into a read-only matrix."""
        basis = np.array(v, dtype=np.float64)
        if basis.ndim != 2 or not np.all(np.isfinite(basis)):
            raise ValueError("basis must be a finite matrix")
        basis.flags.writeable = False
        return basis

    @model_validator(mode="after")
    def validate_shapes(self) -> "PcaModel":
        """Check the mean, basis and scales agree on N and K."""
        if self.mean.shape[0] % 3 != 0:
            raise ValueError("mean length must be a multiple of 3")
        if self.basis.shape[0] != self.mean.shape[0]:
            raise ValueError("basis rows must match the mean length")
        if self.basis.shape[1] != self.component_scales.shape[0]:
            raise ValueError("one component scale per basis column is required")
        return self

    @property
    def n_vertices(self) -> int:
        """Number of mesh vertices N."""
        return self.mean.shape[0] // 3

    @property
    def k(self) -> int:
        """Number of components K."""
        return self.basis.shape[1]

    def mean_mesh(self) -> CanonicalMesh:
        """Return the mean as a mesh."""
        return CanonicalMesh.from_flat(self.mean)
