"""CSV ingestion, validation, and the bundled 8-country dataset.

Input format: a UTF-8 CSV with header ``country,emissions_prev,
emissions_curr,population`` (LF or CRLF).  Numeric fields may carry
thousands-separator commas only when the field is quoted.  Emissions are in
1000 metric tons, populations in persons.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import DatasetFormatError, DomainError, ValidationError
from .model import Agent, AllocationProblem, NegativePerCapitaDemand, PotentialSpec, cap_from_reduction

EXPECTED_HEADER = ("country", "emissions_prev", "emissions_curr", "population")

FIXTURE_NAME = "table2_8countries"
FIXTURE_ALIASES = (FIXTURE_NAME, "table2")
FIXTURE_PROVENANCE = (
    "table2_8countries (bundled 8-country dataset: UN MDG emissions series, "
    "World Bank population)"
)


@dataclass(frozen=True)
class DatasetRecord:
    """One country row: prior and current emissions (1000 t) and population."""

    country: str
    emissions_prev: float
    emissions_curr: float
    population: float


@dataclass(frozen=True)
class Dataset:
    """Ordered country records plus a free-text source description."""

    records: tuple[DatasetRecord, ...]
    provenance: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))


def _numeric(field: str, column: str, line_num: int) -> float:
    # commas inside a field can only have survived csv splitting if the
    # field was quoted, so stripping them here honors the quoted-only rule
    text = field.strip().replace(",", "")
    try:
        value = float(text)
    except ValueError:
        raise DatasetFormatError(
            f"line {line_num}: {column} is not numeric: {field.strip()!r}"
        ) from None
    if not value >= 0 or value != value:
        raise DatasetFormatError(
            f"line {line_num}: {column} must be nonnegative, got {field.strip()!r}"
        )
    return value


def parse_dataset(source, format: str = "csv", provenance: str | None = None) -> Dataset:
    """Parse and validate a dataset from a path, bytes, or file object.

    Raises DatasetFormatError on header or row problems (with line numbers),
    ValidationError on duplicate countries or an empty dataset.
    """
    if format != "csv":
        raise DatasetFormatError(f"unsupported dataset format {format!r}")

    if isinstance(source, (str, Path)):
        text = Path(source).read_bytes().decode("utf-8-sig")
        if provenance is None:
            provenance = str(source)
    elif isinstance(source, bytes):
        text = source.decode("utf-8-sig")
    else:
        raw = source.read()
        text = raw.decode("utf-8-sig") if isinstance(raw, bytes) else raw
    if provenance is None:
        provenance = "<stream>"

    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetFormatError(
            f"missing header; expected {','.join(EXPECTED_HEADER)}"
        ) from None
    normalized = tuple(h.strip().lower() for h in header)
    if normalized != EXPECTED_HEADER:
        raise DatasetFormatError(
            f"unexpected header: expected {','.join(EXPECTED_HEADER)}, "
            f"got {','.join(normalized)}"
        )

    records: list[DatasetRecord] = []
    seen: set[str] = set()
    for row in reader:
        line_num = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(EXPECTED_HEADER):
            raise DatasetFormatError(
                f"line {line_num}: expected {len(EXPECTED_HEADER)} fields, got {len(row)}"
            )
        country = row[0].strip()
        if not country:
            raise DatasetFormatError(f"line {line_num}: country must be nonempty")
        prev = _numeric(row[1], "emissions_prev", line_num)
        curr = _numeric(row[2], "emissions_curr", line_num)
        population = _numeric(row[3], "population", line_num)
        if population <= 0:
            raise DatasetFormatError(
                f"line {line_num}: population must be positive"
            )
        if country in seen:
            raise ValidationError(f"duplicate country {country!r}")
        seen.add(country)
        records.append(
            DatasetRecord(
                country=country,
                emissions_prev=prev,
                emissions_curr=curr,
                population=population,
            )
        )

    if not records:
        raise ValidationError("dataset is empty (no data rows)")
    return Dataset(records=tuple(records), provenance=provenance)


def _format_quantity(value: float) -> str:
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def serialize_dataset(dataset: Dataset) -> str:
    """Render a dataset back to CSV text; reparsing yields identical records."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(EXPECTED_HEADER)
    for r in dataset.records:
        writer.writerow(
            [
                r.country,
                _format_quantity(r.emissions_prev),
                _format_quantity(r.emissions_curr),
                _format_quantity(r.population),
            ]
        )
    return out.getvalue()


def to_problem(
    dataset: Dataset,
    cap: float | None = None,
    reduction: float | None = None,
    potential: PotentialSpec | None = None,
) -> AllocationProblem:
    """Build an allocation problem from a dataset and exactly one cap mode.

    Agents take demand from current emissions and baseline from prior
    emissions; the cap is either explicit or derived by shrinking summed
    baselines by ``reduction``.
    """
    if (cap is None) == (reduction is None):
        raise DomainError("exactly one of cap or reduction must be given")
    agents = tuple(
        Agent(
            name=r.country,
            population=r.population,
            demand=r.emissions_curr,
            baseline=r.emissions_prev,
        )
        for r in dataset.records
    )
    total = float(cap) if cap is not None else cap_from_reduction(agents, reduction)
    return AllocationProblem(
        agents=agents,
        total_permits=total,
        potential=potential if potential is not None else NegativePerCapitaDemand(),
    )


def fixture_path(name: str = FIXTURE_NAME) -> Path:
    """Filesystem path of a bundled dataset (accepts the table2 alias)."""
    if name not in FIXTURE_ALIASES:
        raise ValidationError(f"unknown bundled dataset {name!r}")
    return Path(str(resources.files("boltzalloc") / "data" / f"{FIXTURE_NAME}.csv"))


def load_fixture(name: str = FIXTURE_NAME) -> Dataset:
    """Parse the bundled 8-country dataset."""
    return parse_dataset(fixture_path(name), provenance=FIXTURE_PROVENANCE)
