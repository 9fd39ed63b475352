"""
Golden expansion files and coefficient tables.
"""
import json
from pathlib import Path
from typing import Dict, List, Optional, Union

from app.algebra.graded_poly import GradedPoly
from app.algebra.qseries import EIGHTHS_PER_UNIT, QSeries
from app.algebra.serialization import dumps, loads
from app.models.config import Config
from app.models.geometry import Family, GeometrySpec
from app.models.report import CheckResult
from app.models.tables import BrTable
from app.services.cancellation_service import CancellationService
from app.services.charform_service import Which
from app.services.lambda_ring_service import LambdaRingService
from app.services.theta_service import ModularFormId, ThetaId
from app.utils.checks import Stopwatch, exact_check
from app.utils.exceptions import ConfigError, GoldenFileError
from app.utils.logger import get_logger

logger = get_logger(__name__)

GOLDEN_Q_ORDER = 20

Artifact = Union[GradedPoly, QSeries, str]


def br_table_name(k: int, family: Family) -> str:
    return f"br_table_k{k}_{Family.parse(family).slug}.json"


class GoldenService:
    """Builds, writes and compares the golden artifact set."""

    def __init__(self, cancellation_service: Optional[CancellationService] = None,
                 lambda_service: Optional[LambdaRingService] = None) -> None:
        self.cancellation_service = cancellation_service or CancellationService()
        self.lambda_service = lambda_service or LambdaRingService(self.cancellation_service)

    def br_table(self, k: int, family: Family) -> BrTable:
        return BrTable.from_table(self.cancellation_service.build_extraction_table(k, Family.parse(family)))

    def golden_set(self, config: Config) -> Dict[str, Artifact]:
        """File name -> artifact for the configured run."""
        theta = self.cancellation_service.theta_service
        charforms = self.cancellation_service.charform_service
        q8 = EIGHTHS_PER_UNIT * GOLDEN_Q_ORDER
        artifacts: Dict[str, Artifact] = {}
        for theta_id in (ThetaId.THETA1, ThetaId.THETA2, ThetaId.THETA3):
            artifacts[f"theta_constant_{theta_id.value}.txt"] = theta.theta_constant(theta_id, q8)
        artifacts["theta_prime_over_pi.txt"] = theta.theta_prime_over_pi(q8)
        for form_id in ModularFormId:
            artifacts[f"modular_{form_id.value}.txt"] = theta.modular_form_qexp(form_id, q8)
        for xi_trivial in (False, True):
            spec = GeometrySpec(k=1, family=Family.EIGHT_K_PLUS_FOUR, l=3, p1_identified=True, xi_trivial=xi_trivial)
            name = "ch_theta2_k1_trivial_xi.txt" if xi_trivial else "ch_theta2_k1.txt"
            artifacts[name] = charforms.ch_theta(Which.TWO, charforms.coordinates(spec), config.q_order)
        table = self.br_table(config.k, config.family)
        artifacts[br_table_name(config.k, config.family)] = table.model_dump_json(indent=2) + "\n"
        return artifacts

    @staticmethod
    def render(artifact: Artifact) -> str:
        return artifact if isinstance(artifact, str) else dumps(artifact)

    def emit(self, config: Config, directory: Union[str, Path]) -> List[Path]:
        """Write the golden set; I/O failures propagate as OSError."""
        root = Path(directory)
        root.mkdir(parents=True, exist_ok=True)
        written = []
        for name, artifact in sorted(self.golden_set(config).items()):
            path = root / name
            path.write_text(self.render(artifact), encoding="utf-8")
            written.append(path)
        logger.info(f"Wrote {len(written)} golden files to {root}")
        return written

    def compare(self, config: Config, directory: Union[str, Path]) -> List[CheckResult]:
        """One check per golden file: the stored text must equal the freshly computed one."""
        root = Path(directory)
        if not root.is_dir():
            raise ConfigError(f"golden directory '{root}' is not readable")
        checks = []
        for name, artifact in sorted(self.golden_set(config).items()):
            watch = Stopwatch()
            path = root / name
            expected = self.render(artifact)
            if not path.exists():
                checks.append(exact_check(f"golden.{name}", f"{name} matches the stored golden file",
                                          True, watch, witness="golden file missing"))
                continue
            stored = path.read_text(encoding="utf-8")
            if name.endswith(".json"):
                try:
                    stored = BrTable.model_validate(json.loads(stored)).model_dump_json(indent=2) + "\n"
                except ValueError as exc:
                    raise GoldenFileError(f"{path}: {exc}") from exc
            else:
                stored = dumps(loads(stored))
            checks.append(exact_check(
                f"golden.{name}", f"{name} matches the stored golden file",
                stored != expected, watch, {"path": str(path)},
                witness=_first_difference(stored, expected) if stored != expected else None,
            ))
        return checks

    def emit_tables(self, k: int, family: Family, directory: Union[str, Path]) -> List[Path]:
        """b_r table JSON and, for the 8k+4 family, one C_r quotient file per r."""
        family = Family.parse(family)
        root = Path(directory)
        root.mkdir(parents=True, exist_ok=True)
        table_path = root / br_table_name(k, family)
        table_path.write_text(self.br_table(k, family).model_dump_json(indent=2) + "\n", encoding="utf-8")
        written = [table_path]
        if family is Family.EIGHT_K_PLUS_FOUR:
            for r, quotient in enumerate(self.lambda_service.extract_Cr(k, family=family)):
                path = root / f"cr_k{k}_r{r}.txt"
                path.write_text(dumps(quotient), encoding="utf-8")
                written.append(path)
        logger.info(f"Wrote {len(written)} table files to {root}")
        return written


def _first_difference(stored: str, expected: str) -> str:
    for lineno, (a, b) in enumerate(zip(stored.splitlines(), expected.splitlines()), start=1):
        if a != b:
            return f"line {lineno}: stored '{a}', computed '{b}'"
    return "files differ in length"
