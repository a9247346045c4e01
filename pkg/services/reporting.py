"""
Run summaries and the TSV / JSON artefacts written by the command-line front end
"""

import csv
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, model_validator

from config.mappings import COMPARE_COLUMNS, PATTERN_COLUMNS
from config.settings import settings
from .bonferroni import FactorRow, format_big_int, log10_int
from .lamp_engine import SignificantPattern
from .stat_kernel import LogProb
from .subsample import EstimateSummary

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
LN10 = math.log(10.0)


class RunSummary(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    dataset: str
    N: int
    P: int
    n: int
    alpha: float
    strategy: str
    tail: str
    sigma_rt: int
    num_testable: int
    delta: float
    log_delta: float
    num_significant: int
    miner_invocations: int
    wall_time_ms: float
    label_orientation: str
    threads: int
    version: str
    verified: Optional[bool] = None

    @model_validator(mode="after")
    def _significant_within_testable(self) -> "RunSummary":
        if self.num_significant > self.num_testable:
            raise ValueError("num_significant cannot exceed num_testable")
        return self


class EstimateReport(BaseModel):
    dataset: str
    N: int
    P: int
    n: int
    alpha: float
    label_orientation: str
    wall_time_ms: float
    version: str
    summary: EstimateSummary


def format_log_prob(log_p: LogProb, digits: int) -> str:
    """Decimal rendering of exp(log_p) with the given significant digits, without underflow"""
    if log_p == float("-inf"):
        return "0"
    if log_p > -700.0:
        return f"{math.exp(log_p):.{digits}g}"
    log10_p = log_p / LN10
    exponent = int(math.floor(log10_p))
    mantissa = round(10 ** (log10_p - exponent), digits - 1)
    if mantissa >= 10:
        mantissa /= 10
        exponent += 1
    return f"{mantissa:.{digits - 1}f}".rstrip("0").rstrip(".") + f"e{exponent:+03d}"


def pattern_row(pattern: SignificantPattern, digits: int) -> List[str]:
    return [
        " ".join(str(item) for item in pattern.items),
        str(pattern.support),
        str(pattern.positive_count),
        format_log_prob(pattern.p_value, digits),
        f"{pattern.p_value / LN10:.6f}",
    ]


def write_patterns_tsv(
    path: PathLike,
    patterns: Sequence[SignificantPattern],
    digits: int = settings.P_VALUE_DIGITS,
) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="ascii") as handle:
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        writer.writerow(PATTERN_COLUMNS)
        for pattern in patterns:
            writer.writerow(pattern_row(pattern, digits))
    logger.info(f"Wrote {len(patterns)} patterns to {path}")
    return path


def read_patterns_tsv(path: PathLike) -> List[dict]:
    with Path(path).open(newline="", encoding="ascii") as handle:
        return list(csv.DictReader(handle, delimiter="\t"))


def write_model_json(path: PathLike, model: BaseModel) -> Path:
    path = Path(path)
    path.write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def read_summary_json(path: PathLike) -> RunSummary:
    return RunSummary.model_validate_json(Path(path).read_text(encoding="utf-8"))


def read_estimate_json(path: PathLike) -> EstimateReport:
    return EstimateReport.model_validate_json(Path(path).read_text(encoding="utf-8"))


def factor_rows(rows: Sequence[FactorRow], exact: bool = False) -> List[List[str]]:
    table = []
    for row in rows:
        order = "all" if row.max_order is None else str(row.max_order)
        if exact:
            factor = _exact_digits(row.factor)
        else:
            factor = format_big_int(row.factor)
        table.append([row.correction, order, factor, f"{log10_int(row.factor):.4f}"])
    return table


def _exact_digits(value: int) -> str:
    # Python 3.11+ limits int -> str conversion length by default.
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    return str(value)


def write_compare_tsv(path: PathLike, rows: Sequence[FactorRow], exact: bool = False) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="ascii") as handle:
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        writer.writerow(COMPARE_COLUMNS)
        writer.writerows(factor_rows(rows, exact=exact))
    logger.info(f"Wrote {path}")
    return path


def render_compare_table(rows: Sequence[FactorRow], exact: bool = False) -> str:
    lines = ["\t".join(COMPARE_COLUMNS)]
    lines.extend("\t".join(row) for row in factor_rows(rows, exact=exact))
    return "\n".join(lines)
