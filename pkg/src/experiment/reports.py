"""Report models for complexity and sparsity accounting, JSON and Markdown."""

import json
from pathlib import Path
from typing import Optional

from pydantic import BaseModel


class StepCost(BaseModel):
    step: int
    xi_km: float
    nonzero: int
    cd_rms: float
    mimo_rms: float

    @property
    def total_rms(self) -> float:
        return self.cd_rms + self.mimo_rms


class RmReport(BaseModel):
    """Real multiplications per subband and step."""

    n_active: int
    n_steps: int
    half_length: int
    steps: list[StepCost]
    total_nonzero: int
    cd_rms: float
    mimo_rms: float
    fd_fft_size: Optional[int] = None
    fd_rms: Optional[float] = None

    @property
    def total_rms(self) -> float:
        return self.cd_rms + self.mimo_rms


class SparsityReport(BaseModel):
    tau: float
    nonzero_per_step: list[int]
    total_nonzero: int
    total_coefficients: int
    mimo_rms: float

    @property
    def removed_fraction(self) -> float:
        if self.total_coefficients == 0:
            return 0.0
        return 1.0 - self.total_nonzero / self.total_coefficients


def write_json(model: BaseModel, path: Path) -> Path:
    path.write_text(json.dumps(model.model_dump(), indent=2, sort_keys=True))
    return path


def rm_markdown(report: RmReport) -> str:
    lines = [
        "# Complexity",
        "",
        f"{report.n_active} active subbands, {report.n_steps} steps, "
        f"CD half length {report.half_length}.",
        "",
        "| Method | CD RMs | MIMO RMs | Total RMs |",
        "|--------|--------|----------|-----------|",
        f"| Subband TD-DBP | {report.cd_rms:.2f} | {report.mimo_rms:.2f} "
        f"| {report.total_rms:.2f} |",
    ]
    if report.fd_rms is not None:
        lines.append(f"| FD subband DBP (n={report.fd_fft_size}) | - | - | {report.fd_rms:.2f} |")
    lines += [
        "",
        "## Steps",
        "",
        "| Step | xi [km] | Nonzero | CD RMs | MIMO RMs |",
        "|------|---------|---------|--------|----------|",
    ]
    for s in report.steps:
        lines.append(
            f"| {s.step} | {s.xi_km:.3f} | {s.nonzero} | {s.cd_rms:.2f} | {s.mimo_rms:.2f} |"
        )
    return "\n".join(lines) + "\n"
