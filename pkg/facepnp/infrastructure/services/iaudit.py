"""A module containing the gradient audit service interface."""

from abc import ABC, abstractmethod

from facepnp.core.domain.report import GradAuditReport


class IAuditService(ABC):
    """An abstract class for the gradient audit service."""

    @abstractmethod
    def run_grad_audit(self, seed: int, n_instances: int) -> GradAuditReport:
        """A method checking every analytic gradient against central differences.

        Args:
            seed (int): Root seed of the random instances.
            n_instances (int): Instances per audited operation.

        Returns:
            GradAuditReport: One row per operation; empty when n_instances is 0.
        """
