"""CheckSuite class: groups checks and runs them over a construction."""

from __future__ import annotations

import logging
import time
from typing import Iterator

from .check import Check
from .embedding import Construction
from .verify import CONSTRUCTION_CHECKS, STAGE_CHECKS, LemmaReport, merge_reports, not_certified

logger = logging.getLogger(__name__)


class CheckSuite:
    """An ordered, name-addressable collection of checks.

    Stage-scoped checks run once per stage from their ``min_stage`` on;
    construction-scoped checks run once. Checks that cannot certify in the
    schedule's mode report ``"not-certified"`` without running.
    """

    def __init__(self, checks: list[Check]) -> None:
        for item in checks:
            if not isinstance(item, Check):
                raise TypeError(
                    f"Expected Check instance, got {type(item).__name__}. Did you forget @lemma_check?"
                )
        self.checks = checks
        self._check_map: dict[str, Check] = {}
        for c in checks:
            if c.name in self._check_map:
                raise ValueError(
                    f"Duplicate check name '{c.name}'. Each check in a CheckSuite must have a unique name."
                )
            self._check_map[c.name] = c

    def get_check(self, name: str) -> Check:
        """Look up a check by name. Raises KeyError if not found."""
        return self._check_map[name]

    def __iter__(self) -> Iterator[Check]:
        return iter(self.checks)

    def __len__(self) -> int:
        return len(self.checks)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.checks]

    def filter(self, *names: str) -> CheckSuite:
        """A suite with only the named checks, in this suite's order.

        Raises:
            KeyError: a name is not in the suite.
        """
        unknown = [n for n in names if n not in self._check_map]
        if unknown:
            raise KeyError(f"Unknown checks: {', '.join(unknown)}. Available: {', '.join(self.names)}")
        wanted = set(names)
        return CheckSuite([c for c in self.checks if c.name in wanted])

    def _timed(self, check: Check, *args: object) -> LemmaReport:
        start = time.perf_counter()
        report = check(*args)
        report.duration_ms = (time.perf_counter() - start) * 1000
        return report

    def run(self, construction: Construction) -> list[LemmaReport]:
        """Run every check; per-stage reports of a stage check come out in stage order."""
        mode = construction.schedule.mode
        reports: list[LemmaReport] = []
        for check in self.checks:
            if not check.certifies(mode):
                reports.append(not_certified(check.name, mode, f"{check.name} certifies only in {', '.join(check.modes)} mode"))
                continue
            if check.scope == "construction":
                reports.append(self._timed(check, construction))
            else:
                for stage in construction.stages[check.min_stage :]:
                    report = self._timed(check, stage, construction.schedule, construction.space)
                    reports.append(report)
            logger.debug("check %s done", check.name)
        return reports

    def run_merged(self, construction: Construction) -> list[LemmaReport]:
        """Like run(), with each check's per-stage reports merged into one."""
        by_name: dict[str, list[LemmaReport]] = {}
        for r in self.run(construction):
            by_name.setdefault(r.lemma, []).append(r)
        return [merge_reports(rs) if len(rs) > 1 else rs[0] for rs in by_name.values()]

    def __repr__(self) -> str:
        return f"CheckSuite({', '.join(self.names)})"


def default_suite() -> CheckSuite:
    """Every built-in check, stage checks first."""
    return CheckSuite([*STAGE_CHECKS, *CONSTRUCTION_CHECKS])
