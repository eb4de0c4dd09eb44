"""A module containing the training loss service interface."""

from abc import ABC, abstractmethod
from typing import Mapping

import numpy as np

from facepnp.core.domain.losses import LossValue, TotalLossConfig, WpdcWeights
from facepnp.core.domain.shape import CanonicalMesh, LandmarkSet, PcaCoeffs


class ILossService(ABC):
    """An abstract class for the training loss service."""

    @abstractmethod
    def gnll(self, pred: LandmarkSet, gt_mu: np.ndarray) -> LossValue:
        """Gaussian negative log-likelihood of the landmarks.

        Args:
            pred (LandmarkSet): Predicted means and uncertainties.
            gt_mu (np.ndarray): (N, 2) ground-truth landmarks.

        Returns:
            LossValue: The loss with "mu" and "log_sigma" gradients.
        """

    @abstractmethod
    def vdc(self, pred: CanonicalMesh, gt: CanonicalMesh) -> LossValue:
        """Vertex distance cost.

        Args:
            pred (CanonicalMesh): Predicted mesh.
            gt (CanonicalMesh): Ground-truth mesh.

        Returns:
            LossValue: The loss with a "vertices" gradient.
        """

    @abstractmethod
    def wpdc(self, pred: PcaCoeffs, gt: PcaCoeffs, weights: WpdcWeights) -> LossValue:
        """Weighted parameter distance cost.

        Args:
            pred (PcaCoeffs): Predicted coefficients.
            gt (PcaCoeffs): Ground-truth coefficients.
            weights (WpdcWeights): Per-coefficient weights.

        Returns:
            LossValue: The loss with a "coeffs" gradient.
        """

    @abstractmethod
    def total_loss(self, parts: Mapping[str, LossValue], cfg: TotalLossConfig) -> LossValue:
        """Weighted sum of loss parts.

        Args:
            parts (Mapping[str, LossValue]): Parts keyed "gnll", "vdc", "wpdc", "pnp".
            cfg (TotalLossConfig): The part weights.

        Returns:
            LossValue: The total with per-input summed gradients.
        """
