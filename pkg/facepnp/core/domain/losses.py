"""Module containing training loss domain models"""

from typing import Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from facepnp.core.domain.geometry import FloatArray


class LossValue(BaseModel):
    """Model representing a scalar loss and its gradients.

    Attributes:
        value: The loss value.
        gradients: Gradient per prediction input, keyed by input name
            ("mu", "log_sigma", "vertices", "coeffs"); each array has the
            shape of the input it differentiates.
    """
    value: float
    gradients: Dict[str, np.ndarray] = Field(default_factory=dict)

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class WpdcWeights(BaseModel):
    """Model representing the per-coefficient weights W of WPDC.

    Weights are non-negative and normalized to sum to K.
    """
    values: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("values", mode="before")
    @classmethod
    def validate_values(cls, v: object) -> FloatArray:
        """Check non-negativity and the sum-to-K normalization."""
        values = np.array(v, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("WPDC weights must be finite and non-negative")
        if abs(float(values.sum()) - values.shape[0]) > 1e-9 * max(1, values.shape[0]):
            raise ValueError("WPDC weights must sum to K")
        values.flags.writeable = False
        return values

    @classmethod
    def uniform(cls, k: int) -> "WpdcWeights":
        """Return all-ones weights."""
        return cls(values=np.ones(k))

    @property
    def k(self) -> int:
        """Number of weighted coefficients."""
        return self.values.shape[0]


class TotalLossConfig(BaseModel):
    """Model representing the weights of the total training loss."""
    lambda_gnll: float = Field(0.01, ge=0)
    lambda_vdc: float = Field(20.0, ge=0)
    lambda_wpdc: float = Field(10.0, ge=0)
    lambda_pnp: float = Field(2.0, ge=0)

    model_config = ConfigDict(frozen=True)

    def as_dict(self) -> Dict[str, float]:
        """Return the weights keyed by loss part name."""
        return {
            "gnll": self.lambda_gnll,
            "vdc": self.lambda_vdc,
            "wpdc": self.lambda_wpdc,
            "pnp": self.lambda_pnp,
        }
