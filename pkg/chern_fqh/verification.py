"""
Oracle-equivalence sweeps.

Generates the admissible configurations of small size and compares the
brute-force Berezin pipeline against the closed-form pipelines on each of them.
"""

from __future__ import annotations

import itertools
import logging
import random
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field

from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn

from .algebra.exactlinalg import IntSymMatrix, det, is_psd
from .algebra.series import BinomialConvention
from .config import config
from .errors import ChernFqhError
from .models import Configuration
from .pipeline import EquivalenceReport, verify_equivalence

logger = logging.getLogger(__name__)


# ========================================
# Configuration generators
# ========================================


def symmetric_matrices(k: int, low: int, high: int) -> Iterator[IntSymMatrix]:
    """Every k x k symmetric matrix with entries in [low, high], upper triangle in product order."""
    positions = [(i, j) for i in range(k) for j in range(i, k)]
    for values in itertools.product(range(low, high + 1), repeat=len(positions)):
        rows = [[0] * k for _ in range(k)]
        for (i, j), value in zip(positions, values):
            rows[i][j] = value
            rows[j][i] = value
        yield IntSymMatrix.from_rows(rows)


def admissible(matrix: IntSymMatrix) -> bool:
    """K - I positive semidefinite and det(K) != 0."""
    return det(matrix) != 0 and is_psd(matrix.minus_identity())


def minimal_configuration(matrix: IntSymMatrix, g: int, p: Sequence[int]) -> Configuration:
    """n_i = 2g (smallest with n_i > 2g - 1), d = p + K n + (g - 1) diag K."""
    k = matrix.size
    n = (2 * g,) * k
    d = tuple(
        p[i] + sum(matrix[i, j] * n[j] for j in range(k)) + (g - 1) * matrix[i, i]
        for i in range(k)
    )
    return Configuration(matrix, g, d, n)


def acceptance_configurations(
    k_max: int = 2, g_max: int = 2, entry_max: int = 4, p_max: int = 2
) -> list[Configuration]:
    configurations = []
    for k in range(1, k_max + 1):
        matrices = [m for m in symmetric_matrices(k, 0, entry_max) if admissible(m)]
        for g in range(1, g_max + 1):
            for matrix in matrices:
                for p in itertools.product(range(p_max + 1), repeat=k):
                    configurations.append(minimal_configuration(matrix, g, p))
    logger.info(f"generated {len(configurations)} configurations (k<={k_max}, g<={g_max})")
    return configurations


def spot_check_configurations(
    count: int = 5,
    *,
    seed: int = 0,
    shapes: Sequence[tuple[int, int]] = ((2, 3), (3, 1)),
    entry_max: int = 3,
    p_max: int = 2,
) -> list[Configuration]:
    """``count`` random admissible configurations for every (k, g) in ``shapes``."""
    rng = random.Random(seed)
    configurations = []
    for k, g in shapes:
        matrices = [m for m in symmetric_matrices(k, 0, entry_max) if admissible(m)]
        for _ in range(count):
            matrix = rng.choice(matrices)
            p = [rng.randint(0, p_max) for _ in range(k)]
            configurations.append(minimal_configuration(matrix, g, p))
    return configurations


# ========================================
# Sweep runner
# ========================================


@dataclass
class SweepOutcome:
    """Reports in input order plus the configurations that raised."""

    reports: list[EquivalenceReport] = field(default_factory=list)
    errors: list[tuple[Configuration, str]] = field(default_factory=list)

    @property
    def failures(self) -> list[EquivalenceReport]:
        return [report for report in self.reports if not report.equal]

    @property
    def passed(self) -> bool:
        return not self.failures and not self.errors

    def to_dict(self) -> dict:
        return {
            "checked": len(self.reports),
            "passed": len(self.reports) - len(self.failures),
            "failed": [report.to_dict() for report in self.failures],
            "errors": [
                {"configuration": cfg.to_dict(), "message": message}
                for cfg, message in self.errors
            ],
        }


def _check(
    cfg: Configuration,
    convention: BinomialConvention | None,
    exponent_sign: int,
) -> EquivalenceReport:
    return verify_equivalence(cfg, convention=convention, exponent_sign=exponent_sign)


def run_sweep(
    configurations: Sequence[Configuration],
    *,
    convention: BinomialConvention | None = None,
    exponent_sign: int = -1,
    workers: int | None = None,
    console: Console | None = None,
) -> SweepOutcome:
    """
    Verify every configuration, serially or on a process pool.

    Results are stored by input position so the outcome does not depend on
    completion order.
    """
    workers = workers or config.WORKERS
    console = console or Console(stderr=True)
    slots: list[EquivalenceReport | None] = [None] * len(configurations)
    outcome = SweepOutcome()

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        console=console,
        transient=True,
    ) as progress:
        task = progress.add_task("Verifying configurations...", total=len(configurations))

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                futures = {
                    executor.submit(_check, cfg, convention, exponent_sign): index
                    for index, cfg in enumerate(configurations)
                }
                for future in as_completed(futures):
                    index = futures[future]
                    try:
                        slots[index] = future.result()
                    except ChernFqhError as e:
                        logger.error(f"Failed for {configurations[index].to_dict()}: {e}")
                        outcome.errors.append((configurations[index], str(e)))
                    progress.advance(task)
        else:
            for index, cfg in enumerate(configurations):
                progress.update(task, description=f"[cyan]k={cfg.k} g={cfg.g}[/cyan] p={list(cfg.p)}")
                try:
                    slots[index] = _check(cfg, convention, exponent_sign)
                except ChernFqhError as e:
                    logger.error(f"Failed for {cfg.to_dict()}: {e}")
                    outcome.errors.append((cfg, str(e)))
                progress.advance(task)

    outcome.reports = [report for report in slots if report is not None]
    outcome.errors.sort(key=lambda item: configurations.index(item[0]))
    logger.info(
        f"verified {len(outcome.reports)} configurations: "
        f"{len(outcome.failures)} mismatches, {len(outcome.errors)} errors"
    )
    return outcome
