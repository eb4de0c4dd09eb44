"""A module containing the training loss service implementation."""

from typing import Dict, Mapping

import numpy as np

from facepnp.core.domain.errors import DimensionMismatch
from facepnp.core.domain.geometry import coerce_points
from facepnp.core.domain.losses import LossValue, TotalLossConfig, WpdcWeights
from facepnp.core.domain.shape import CanonicalMesh, LandmarkSet, PcaCoeffs
from facepnp.infrastructure.services.iloss import ILossService


class LossService(ILossService):
    """A class implementing the training losses with analytic gradients."""

    def gnll(self, pred: LandmarkSet, gt_mu: np.ndarray) -> LossValue:
        """Sum over points of log(sigma^2) + ||mu - mu_gt||^2 / (2 sigma^2).

        With sigma = exp(s) the s-gradient is 2 - ||e||^2 exp(-2 s), which
        vanishes at sigma^2 = ||e||^2 / 2.

        Raises:
            DimensionMismatch: If the point counts differ.
        """
        gt_mu = coerce_points(gt_mu, 2, "gt_mu")
        if gt_mu.shape[0] != pred.n_points:
            raise DimensionMismatch(f"{pred.n_points} predictions but {gt_mu.shape[0]} targets")
        error = pred.mu - gt_mu
        squared = np.sum(error ** 2, axis=1)
        inv_var = np.exp(-2.0 * pred.log_sigma)
        value = float(np.sum(2.0 * pred.log_sigma + 0.5 * squared * inv_var))
        return LossValue(
            value=value,
            gradients={
                "mu": error * inv_var[:, None],
                "log_sigma": 2.0 - squared * inv_var,
            },
        )

    def vdc(self, pred: CanonicalMesh, gt: CanonicalMesh) -> LossValue:
        """Mean over vertices of the squared Euclidean distance (mm^2).

        Raises:
            DimensionMismatch: If the vertex counts differ.
        """
        if pred.n_vertices != gt.n_vertices:
            raise DimensionMismatch(f"{pred.n_vertices} predicted vertices but {gt.n_vertices} targets")
        diff = pred.vertices - gt.vertices
        n = pred.n_vertices
        return LossValue(
            value=float(np.sum(diff ** 2) / n),
            gradients={"vertices": 2.0 * diff / n},
        )

    def wpdc(self, pred: PcaCoeffs, gt: PcaCoeffs, weights: WpdcWeights) -> LossValue:
        """Sum over coefficients of (W_i (c_i - c_gt_i))^2.

        Raises:
            DimensionMismatch: If the coefficient counts differ.
        """
        if pred.k != gt.k or pred.k != weights.k:
            raise DimensionMismatch(
                f"coefficient counts differ: pred {pred.k}, gt {gt.k}, weights {weights.k}"
            )
        weighted = weights.values * (pred.values - gt.values)
        return LossValue(
            value=float(np.sum(weighted ** 2)),
            gradients={"coeffs": 2.0 * weights.values * weighted},
        )

    def total_loss(self, parts: Mapping[str, LossValue], cfg: TotalLossConfig) -> LossValue:
        """Weighted sum of loss parts; gradients sharing an input key are summed.

        Raises:
            ValueError: If a part name has no weight.
        """
        lambdas = cfg.as_dict()
        unknown = set(parts) - set(lambdas)
        if unknown:
            raise ValueError(f"unknown loss parts {sorted(unknown)}")

        value = 0.0
        gradients: Dict[str, np.ndarray] = {}
        for name, part in parts.items():
            weight = lambdas[name]
            value += weight * part.value
            for key, grad in part.gradients.items():
                if key in gradients:
                    gradients[key] = gradients[key] + weight * grad
                else:
                    gradients[key] = weight * np.asarray(grad, dtype=np.float64)
        return LossValue(value=value, gradients=gradients)
