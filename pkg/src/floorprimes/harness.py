"""Grid scans of exact values against predicted main terms, exponent fits and report output."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from . import __version__, asym, exact, floorset
from .errors import DomainError, InsufficientDataError, PreconditionError, ResourceError
from .primes import sieve

QUANTITIES = ("pi_S", "S_prime", "S_prime_power", "S_lambda", "cardinality", "progression")
NORMALIZERS = ("sqrt_x", "x_9_19", "pnt_envelope", "li_S_tail")
CSV_FIELDS = ("x", "exact", "predicted", "delta", "normalized")

_CONSTANT_KIND = {"S_prime": "prime", "S_prime_power": "prime_power", "S_lambda": "lambda"}


@dataclass(frozen=True)
class ScanConfig:
    """What to scan and how to normalize it.

    ``c`` parametrizes the ``pnt_envelope`` normalizer.  ``q``/``a`` are only
    used by ``progression``.  ``predictor`` selects ``li_S`` ("strong") or
    ``4 sqrt(x)/log x`` ("weak") for ``pi_S``.  ``constant_source`` is
    ``"series"`` (high precision) or ``"sieve"`` (interval midpoint from a
    table of ``sieve_limit``).
    """

    quantity: str
    x_from: int
    x_to: int
    points: int
    spacing: str = "geometric"
    normalizer: str = "sqrt_x"
    c: float = 1.0
    q: Optional[int] = None
    a: Optional[int] = None
    predictor: str = "strong"
    constant_source: str = "series"
    sieve_limit: Optional[int] = None

    def validate(self) -> "ScanConfig":
        if self.quantity not in QUANTITIES:
            raise DomainError(f"unknown quantity {self.quantity!r}")
        if self.normalizer not in NORMALIZERS:
            raise DomainError(f"unknown normalizer {self.normalizer!r}")
        if self.spacing != "geometric":
            raise DomainError("only geometric spacing is supported")
        if not 16 <= self.x_from <= self.x_to <= exact.MAX_X:
            raise DomainError(f"need 16 <= x_from <= x_to <= 2^50, got [{self.x_from}, {self.x_to}]")
        if not 1 <= self.points <= 10**4 or (self.points == 1 and self.x_from != self.x_to):
            raise DomainError("points must be in [2, 10^4] (1 only when x_from == x_to)")
        if self.quantity == "progression":
            if self.q is None or self.a is None or self.q < 1 or not 1 <= self.a <= self.q:
                raise DomainError("progression needs q >= 1 and 1 <= a <= q")
        if self.predictor not in ("strong", "weak"):
            raise DomainError("predictor must be 'strong' or 'weak'")
        if self.constant_source not in ("series", "sieve"):
            raise DomainError("constant_source must be 'series' or 'sieve'")
        return self


@dataclass(frozen=True)
class ErrorRecord:
    x: int
    exact: Union[int, float]
    predicted: float
    delta: float
    normalized: float


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r2: float
    used: int
    excluded: int


def geometric_grid(x_from: int, x_to: int, points: int) -> List[int]:
    """Integer roundings of a geometric sequence, endpoints exact, deduplicated."""
    if points == 1:
        return [x_from]
    ratio = math.log(x_to / x_from) / (points - 1)
    grid = [x_from] + [round(x_from * math.exp(i * ratio)) for i in range(1, points - 1)] + [x_to]
    return sorted(set(grid))


def normalizer(name: str, x: int, c: float = 1.0) -> float:
    if name == "sqrt_x":
        return math.sqrt(x)
    if name == "x_9_19":
        return x ** (9 / 19)
    if name == "pnt_envelope":
        return asym.pnt_envelope(x, c)
    if name == "li_S_tail":
        return math.sqrt(x) / math.log(x) ** 2
    raise DomainError(f"unknown normalizer {name!r}")


def scan_constants(config: ScanConfig) -> Dict[str, float]:
    """The density constant used by an ``S_*`` scan (empty for other quantities)."""
    kind = _CONSTANT_KIND.get(config.quantity)
    if kind is None:
        return {}
    if config.constant_source == "series":
        return {f"C_{kind}": asym.constant_value(kind)}
    # C_f * x must be off by less than 1e-6 at the top of the grid
    tol = 1e-6 / config.x_to
    need = asym.required_cutoff(kind, tol)
    limit = config.sieve_limit or 0
    if limit < need:
        raise PreconditionError(
            f"constant C_{kind} to tol {tol:.3g} needs sieve limit >= {need}, configured {limit}"
        )
    interval = asym.constant(kind, tol, sieve(limit))
    return {f"C_{kind}": (interval.lower + interval.upper) / 2}


def _exact_value(config: ScanConfig, x: int) -> Union[int, float]:
    if config.quantity == "cardinality":
        return floorset.cardinality(x)
    if config.quantity == "progression":
        return floorset.count_in_progression(x, config.q, config.a)
    return exact.evaluate(x, config.quantity).value


def _predicted(config: ScanConfig, x: int, constants: Dict[str, float]) -> float:
    if config.quantity == "pi_S":
        return asym.li_S(x) if config.predictor == "strong" else asym.weak_main_term(x)
    if config.quantity == "cardinality":
        return 2.0 * math.sqrt(x)
    if config.quantity == "progression":
        return 2.0 * math.sqrt(x) / config.q
    return next(iter(constants.values())) * x


def scan(config: ScanConfig, threads: int = 1) -> List[ErrorRecord]:
    """One :class:`ErrorRecord` per grid point, ordered by ``x``.

    Grid points are independent; ``threads`` only changes wall time.
    """
    config.validate()
    constants = scan_constants(config)
    grid = geometric_grid(config.x_from, config.x_to, config.points)

    def point(x: int) -> ErrorRecord:
        value = _exact_value(config, x)
        predicted = _predicted(config, x, constants)
        delta = float(value - predicted)
        return ErrorRecord(x, value, predicted, delta, delta / normalizer(config.normalizer, x, config.c))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(point, grid))
    return [point(x) for x in grid]


def fit_exponent(records: Iterable[ErrorRecord]) -> ExponentFit:
    """Least-squares line through ``(log x, log |delta|)``; exact hits (delta 0) are skipped."""
    records = list(records)
    usable = [r for r in records if r.delta != 0]
    if len(usable) < 3:
        raise InsufficientDataError(f"need >= 3 records with delta != 0, got {len(usable)}")
    lx = np.log(np.array([float(r.x) for r in usable]))
    ly = np.log(np.abs(np.array([r.delta for r in usable])))
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return ExponentFit(float(slope), float(intercept), r2, len(usable), len(records) - len(usable))


def _render(value: Union[int, float]) -> str:
    return str(value) if isinstance(value, int) else repr(float(value))


def _parse(token: str) -> Union[int, float]:
    try:
        return int(token)
    except ValueError:
        return float(token)


def to_csv(records: Sequence[ErrorRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow([_render(getattr(r, name)) for name in CSV_FIELDS])
    return buf.getvalue()


def to_json(
    records: Sequence[ErrorRecord],
    config: Optional[ScanConfig] = None,
    constants: Optional[Dict[str, float]] = None,
) -> str:
    meta = {"version": __version__, "constants": dict(constants or {})}
    if config is not None:
        meta["config"] = dataclasses.asdict(config)
    body = {"meta": meta, "records": [dataclasses.asdict(r) for r in records]}
    return json.dumps(body, indent=2) + "\n"


def emit(
    records: Sequence[ErrorRecord],
    fmt: str,
    destination: Union[str, Path, TextIO],
    config: Optional[ScanConfig] = None,
    constants: Optional[Dict[str, float]] = None,
) -> None:
    """Write records as CSV (``x,exact,predicted,delta,normalized``) or JSON (``meta`` + ``records``)."""
    if fmt == "csv":
        text = to_csv(records)
    elif fmt == "json":
        text = to_json(records, config, constants)
    else:
        raise DomainError(f"unknown format {fmt!r}")
    if hasattr(destination, "write"):
        destination.write(text)
        return
    if str(destination) == "-":
        sys.stdout.write(text)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ResourceError(f"cannot write {destination}: {exc}") from exc


def read_records(source: Union[str, Path]) -> List[ErrorRecord]:
    """Load records written by :func:`emit` (CSV or JSON, detected from content)."""
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise ResourceError(f"cannot read {source}: {exc}") from exc
    if text.lstrip().startswith("{"):
        return [ErrorRecord(**row) for row in json.loads(text)["records"]]
    rows = list(csv.DictReader(io.StringIO(text)))
    if rows and set(rows[0]) != set(CSV_FIELDS):
        raise DomainError(f"CSV columns must be {','.join(CSV_FIELDS)}")
    return [
        ErrorRecord(
            int(row["x"]),
            _parse(row["exact"]),
            float(row["predicted"]),
            float(row["delta"]),
            float(row["normalized"]),
        )
        for row in rows
    ]


@dataclass
class VerifyReport:
    checked: int = 0
    mismatches: List[Tuple[int, str, object, object]] = dataclasses.field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


PROGRESSIONS = ((2, 1), (3, 2), (5, 5))
_BLOCK_QUANTITIES = ("pi_S", "S_prime", "S_prime_power", "S_lambda", "S_one")


def verify_point(x: int, report: VerifyReport, progressions=PROGRESSIONS) -> None:
    """Compare every block-method quantity at ``x`` with the brute-force loop."""
    oracle = exact.brute_force_many(x, _BLOCK_QUANTITIES, progressions)
    for name in _BLOCK_QUANTITIES:
        got, want = exact.evaluate(x, name), oracle[exact.Quantity(name)]
        if name == "S_lambda":
            tol = 1e-9 * max(got.blocks, 1) + got.error_bound + want.error_bound
            same = abs(got.value - want.value) <= tol
        else:
            same = got.value == want.value
        if not same:
            report.mismatches.append((x, name, got.value, want.value))
    checks = [("cardinality", floorset.cardinality(x), oracle["cardinality"].value)]
    for q, a in progressions:
        checks.append(
            (f"progression({q},{a})", floorset.count_in_progression(x, q, a), oracle[("progression", q, a)].value)
        )
    for name, got_v, want_v in checks:
        if got_v != want_v:
            report.mismatches.append((x, name, got_v, want_v))
    report.checked += 1


def verify(max_x: int, samples: int = 0, sample_max: Optional[int] = None, seed: int = 0) -> VerifyReport:
    """Exhaustive oracle comparison for ``1 <= x <= max_x`` plus ``samples`` random points."""
    if max_x < 1:
        raise DomainError("max_x must be >= 1")
    report = VerifyReport()
    for x in range(1, max_x + 1):
        verify_point(x, report)
    if samples:
        top = sample_max or 10 * max_x
        rng = random.Random(seed)
        for x in sorted(rng.randint(max_x + 1, top) for _ in range(samples)):
            verify_point(x, report)
    return report
