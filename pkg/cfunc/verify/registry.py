"""
Registry of acceptance checks
"""

import time
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

import structlog

from ..config import RunConfig
from ..errors import CFunctionError
from ..models import CheckResult

logger = structlog.get_logger(__name__)

CheckFn = Callable[[RunConfig], Tuple[bool, str]]


class CheckLevel(str, Enum):
    """fast checks run in seconds; full adds the long counting runs"""
    FAST = "fast"
    FULL = "full"


@dataclass
class CheckMetadata:
    """Metadata for registered checks"""
    name: str
    description: str
    category: str
    level: CheckLevel = CheckLevel.FAST
    registered_at: Optional[datetime] = None
    run_count: int = 0
    last_run: Optional[datetime] = None


class CheckRegistry:
    """Registry for acceptance checks, indexed by category"""

    def __init__(self):
        self.checks: Dict[str, CheckFn] = {}
        self.metadata: Dict[str, CheckMetadata] = {}
        self.categories: Dict[str, List[str]] = {}

    def register(self, name: str, category: str, level: CheckLevel = CheckLevel.FAST) -> Callable[[CheckFn], CheckFn]:
        """Decorator registering a check; the docstring becomes its description"""
        def decorate(fn: CheckFn) -> CheckFn:
            if name in self.checks:
                raise ValueError(f"check {name!r} is already registered")
            self.checks[name] = fn
            self.metadata[name] = CheckMetadata(
                name=name,
                description=(fn.__doc__ or "").strip().splitlines()[0] if fn.__doc__ else "",
                category=category,
                level=level,
                registered_at=datetime.now(),
            )
            self.categories.setdefault(category, []).append(name)
            logger.debug("Registered check", name=name, category=category, level=level.value)
            return fn
        return decorate

    def get_check(self, name: str) -> Optional[CheckFn]:
        return self.checks.get(name)

    def get_checks_by_category(self, category: str) -> List[str]:
        return list(self.categories.get(category, []))

    def selected(self, level: CheckLevel) -> List[str]:
        """Names run at a level; full includes the fast checks"""
        level = CheckLevel(level)
        return [name for name, meta in self.metadata.items()
                if level == CheckLevel.FULL or meta.level == CheckLevel.FAST]

    def run_check(self, name: str, config: RunConfig) -> CheckResult:
        fn = self.checks[name]
        meta = self.metadata[name]
        start = time.perf_counter()
        try:
            passed, detail = fn(config)
        except CFunctionError as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        seconds = time.perf_counter() - start
        meta.run_count += 1
        meta.last_run = datetime.now()
        log = logger.info if passed else logger.error
        log("Check finished", name=name, passed=passed, seconds=round(seconds, 3))
        return CheckResult(name=name, category=meta.category, passed=passed,
                           seconds=seconds, detail=detail)

    def run(self, level: CheckLevel, config: RunConfig) -> List[CheckResult]:
        return [self.run_check(name, config) for name in self.selected(level)]

    def list_checks(self) -> List[Dict[str, Any]]:
        """All checks with their metadata"""
        return [
            {
                "name": name,
                "description": meta.description,
                "category": meta.category,
                "level": meta.level.value,
                "run_count": meta.run_count,
                "last_run": meta.last_run.isoformat() if meta.last_run else None,
            }
            for name, meta in self.metadata.items()
        ]
