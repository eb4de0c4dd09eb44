"""Module containing evaluation report domain models"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from facepnp.core.domain.geometry import EulerAngles, RigidPose


class SampleMetrics(BaseModel):
    """Model representing the metrics of one evaluated sample.

    Attributes:
        sample_id: Identifier of the sample.
        mae_r: Mean absolute Euler angle error (deg).
        mae_t: Mean absolute translation error (mm).
        add: Mean per-vertex distance of the ground-truth mesh under both poses (mm).
        geodesic: Relative rotation angle (rad).
        vertex_median: Median canonical vertex error (mm).
        vertex_mean: Mean canonical vertex error (mm).
        gimbal_lock: Whether an Euler decomposition hit gimbal lock.
    """
    sample_id: int = 0
    mae_r: float = Field(..., ge=0)
    mae_t: float = Field(..., ge=0)
    add: float = Field(..., ge=0)
    geodesic: float = Field(..., ge=0)
    vertex_median: float = Field(0.0, ge=0)
    vertex_mean: float = Field(0.0, ge=0)
    gimbal_lock: bool = False

    model_config = ConfigDict(from_attributes=True, frozen=True)


class PoseEvaluation(BaseModel):
    """Model representing the outcome of solving one sample.

    Exactly one of `metrics` and `error` is set.
    """
    sample_id: int
    pose: Optional[RigidPose] = None
    euler: Optional[EulerAngles] = None
    converged: bool = False
    metrics: Optional[SampleMetrics] = None
    error: Optional[str] = None

    model_config = ConfigDict(frozen=True)

    @property
    def failed(self) -> bool:
        """Whether the solver raised for this sample."""
        return self.error is not None


class EvalReport(BaseModel):
    """Model representing aggregated pose and reconstruction metrics."""
    mae_r: float = Field(..., ge=0)
    mae_t: float = Field(..., ge=0)
    add: float = Field(..., ge=0)
    geodesic: float = Field(..., ge=0)
    vertex_median: float = Field(..., ge=0)
    vertex_mean: float = Field(..., ge=0)
    sample_count: int = Field(..., ge=1)
    failure_count: int = Field(0, ge=0)

    model_config = ConfigDict(from_attributes=True, frozen=True)


class TrialResult(BaseModel):
    """Model representing one finetune benchmark trial."""
    trial_id: int
    sample_id: int
    before: EvalReport
    after: EvalReport
    steps_run: int = Field(..., ge=0)
    aborted: bool = False
    abort_reason: Optional[str] = None

    model_config = ConfigDict(frozen=True)

    @property
    def add_delta(self) -> float:
        """ADD after minus ADD before (negative is an improvement)."""
        return self.after.add - self.before.add


class BenchmarkResult(BaseModel):
    """Model representing the outcome of the finetune benchmark.

    Attributes:
        trials: Per-trial results ordered by trial id.
        win_rate: Fraction of trials whose ADD decreased.
        mean_add_before: Mean ADD at the phase-1 optimum (mm).
        mean_add_after: Mean ADD after phase 2 (mm).
        mean_add_delta: mean_add_after - mean_add_before (mm).
        aborted_count: Trials stopped by the divergence guard.
    """
    trials: List[TrialResult]
    win_rate: float = Field(..., ge=0, le=1)
    mean_add_before: float
    mean_add_after: float
    mean_add_delta: float
    aborted_count: int = Field(0, ge=0)

    model_config = ConfigDict(frozen=True)


class GradAuditRow(BaseModel):
    """Model representing the finite-difference audit of one operation."""
    op: str
    max_rel_error: float = Field(..., ge=0)
    threshold: float = Field(..., gt=0)
    n_instances: int = Field(..., ge=0)
    passed: bool

    model_config = ConfigDict(frozen=True)


class GradAuditReport(BaseModel):
    """Model representing the full gradient audit table."""
    seed: int
    rows: List[GradAuditRow] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)

    @property
    def passed(self) -> bool:
        """Whether every audited operation met its threshold."""
        return all(row.passed for row in self.rows)


class ReconstructionReport(BaseModel):
    """Model representing the direct-vertex versus PCA reconstruction comparison."""
    vertex_noise: float = Field(..., ge=0)
    direct_median: float = Field(..., ge=0)
    direct_mean: float = Field(..., ge=0)
    pca_median: float = Field(..., ge=0)
    pca_mean: float = Field(..., ge=0)
    sample_count: int = Field(..., ge=1)

    model_config = ConfigDict(frozen=True)
