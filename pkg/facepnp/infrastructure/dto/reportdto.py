"""A module containing DTO models for output reports."""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from facepnp.core.domain.report import EvalReport, PoseEvaluation

REPORT_COLUMNS: Tuple[str, ...] = tuple(EvalReport.model_fields)


class EvalReportDTO(EvalReport):
    """A model representing the serialized evaluation report."""

    model_config = ConfigDict(from_attributes=True, frozen=True)

    @classmethod
    def from_report(cls, report: EvalReport) -> "EvalReportDTO":
        """Create the DTO of a report.

        Args:
            report (EvalReport): The report.

        Returns:
            EvalReportDTO: The DTO.
        """
        return cls.model_validate(report)

    def to_json(self) -> str:
        """Return the report as JSON keyed by the report fields."""
        return self.model_dump_json(indent=2)

    @staticmethod
    def csv_header() -> str:
        """Return the CSV header line in the stable column order."""
        return ",".join(REPORT_COLUMNS)

    def to_csv_row(self) -> str:
        """Return the CSV data line; floats use their shortest exact repr."""
        return ",".join(repr(getattr(self, column)) for column in REPORT_COLUMNS)


class SampleRowDTO(BaseModel):
    """A model representing one per-sample line of the solve command."""
    sample_id: int
    rotation: Optional[List[float]] = None
    translation: Optional[List[float]] = None
    euler: Optional[List[float]] = None
    add: Optional[float] = None
    converged: bool = False
    error: Optional[str] = None

    model_config = ConfigDict(from_attributes=True, extra="ignore")

    @classmethod
    def from_evaluation(cls, evaluation: PoseEvaluation) -> "SampleRowDTO":
        """Create a row from the outcome of one sample.

        Args:
            evaluation (PoseEvaluation): The per-sample outcome.

        Returns:
            SampleRowDTO: The row.
        """
        if evaluation.failed:
            return cls(sample_id=evaluation.sample_id, error=evaluation.error)
        return cls(
            sample_id=evaluation.sample_id,
            rotation=list(evaluation.pose.rotation),
            translation=list(evaluation.pose.translation),
            euler=evaluation.euler.as_array().tolist(),
            add=evaluation.metrics.add,
            converged=evaluation.converged,
        )
