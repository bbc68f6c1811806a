import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union
import numpy as np
import pandas as pd
from src.config.constants import (ARTIFACT_EQUILIBRIUM, ARTIFACT_FLOW, ARTIFACT_INITIAL_MEASURE,
                                  ARTIFACT_CERTIFICATE, ARTIFACT_TRACE, ARTIFACT_TIMINGS, ARTIFACT_VALUE_GRID,
                                  ARTIFACT_UNIQUENESS, ARTIFACT_SCENARIO, CSV_FLOAT_FORMAT)
from src.core.arcs import TimeGrid
from src.core.measures import ArcMeasure, SpatialMeasure
from src.core.mild_solution import ValueGrid
from src.exceptions import ShapeMismatchError
from src.models.reports import EquilibriumCertificate, TraceRecord, UniquenessReport


class ArtifactRepository:
    """Files of one run directory: JSON with sorted keys, CSV with full-precision floats."""

    def __init__(self, out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def exists(self, name: str) -> bool:
        return self.path(name).is_file()

    def _ensure_dir(self) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def _write_json(self, name: str, payload: Any) -> None:
        self._ensure_dir()
        self.path(name).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")

    def _read_json(self, name: str) -> Any:
        if not self.exists(name):
            raise ShapeMismatchError(f"{self.out_dir} has no {name}")
        return json.loads(self.path(name).read_text())

    def _write_csv(self, name: str, frame: pd.DataFrame) -> None:
        self._ensure_dir()
        frame.to_csv(self.path(name), index=False, float_format=CSV_FLOAT_FORMAT)

    def _read_csv(self, name: str) -> pd.DataFrame:
        if not self.exists(name):
            raise ShapeMismatchError(f"{self.out_dir} has no {name}")
        return pd.read_csv(self.path(name))

    def save_equilibrium(self, eta: ArcMeasure) -> None:
        self._write_json(ARTIFACT_EQUILIBRIUM, eta.to_dict())

    def load_equilibrium(self) -> ArcMeasure:
        return ArcMeasure.from_dict(self._read_json(ARTIFACT_EQUILIBRIUM))

    def save_flow(self, eta: ArcMeasure) -> None:
        """One row per (time node, arc atom); atoms are not merged so rows are stable across runs."""
        count = eta.size
        frame = pd.DataFrame({
            'k': np.repeat(np.arange(eta.grid.size), count),
            't': np.repeat(eta.grid.times, count),
        })
        positions = eta.nodes.transpose(1, 0, 2).reshape(-1, eta.dim)
        for i in range(eta.dim):
            frame[f'x{i + 1}'] = positions[:, i]
        frame['weight'] = np.tile(eta.weights, eta.grid.size)
        self._write_csv(ARTIFACT_FLOW, frame)

    def load_flow(self) -> List[SpatialMeasure]:
        frame = self._read_csv(ARTIFACT_FLOW)
        coords = sorted((c for c in frame.columns if c.startswith('x')), key=lambda c: int(c[1:]))
        return [SpatialMeasure(group[coords].to_numpy(), group['weight'].to_numpy(), check=False).merged()
                for _, group in frame.groupby('k', sort=True)]

    def save_initial_measure(self, measure: SpatialMeasure) -> None:
        frame = pd.DataFrame(measure.points, columns=[f'x{i + 1}' for i in range(measure.dim)])
        frame['weight'] = measure.weights
        self._write_csv(ARTIFACT_INITIAL_MEASURE, frame)

    def save_certificate(self, certificate: EquilibriumCertificate) -> None:
        self._write_json(ARTIFACT_CERTIFICATE, certificate.model_dump(mode='json'))

    def load_certificate(self) -> EquilibriumCertificate:
        return EquilibriumCertificate.model_validate(self._read_json(ARTIFACT_CERTIFICATE))

    def save_trace(self, trace: Sequence[TraceRecord]) -> None:
        columns = list(TraceRecord.model_fields)
        self._write_csv(ARTIFACT_TRACE, pd.DataFrame([record.model_dump() for record in trace], columns=columns))

    def load_trace(self) -> List[TraceRecord]:
        return [TraceRecord(**row) for row in self._read_csv(ARTIFACT_TRACE).to_dict(orient='records')]

    def save_timings(self, timings: Sequence[Tuple[int, float]]) -> None:
        self._write_csv(ARTIFACT_TIMINGS, pd.DataFrame(list(timings), columns=['iteration', 'wall_time']))

    def save_value_grid(self, u: ValueGrid) -> None:
        self._write_csv(ARTIFACT_VALUE_GRID, u.to_frame())

    def load_value_grid(self, grid: TimeGrid) -> ValueGrid:
        return ValueGrid.from_frame(self._read_csv(ARTIFACT_VALUE_GRID), grid)

    def save_uniqueness(self, report: UniquenessReport) -> None:
        self._write_json(ARTIFACT_UNIQUENESS, report.model_dump(mode='json'))

    def load_uniqueness(self) -> UniquenessReport:
        return UniquenessReport.model_validate(self._read_json(ARTIFACT_UNIQUENESS))

    def save_scenario(self, scenario: Dict[str, Any]) -> None:
        self._write_json(ARTIFACT_SCENARIO, scenario)

    def load_scenario(self) -> Dict[str, Any]:
        return self._read_json(ARTIFACT_SCENARIO)
