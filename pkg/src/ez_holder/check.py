"""Check class and @lemma_check decorator."""

from __future__ import annotations

import functools
import inspect
from dataclasses import dataclass
from typing import Any, Callable, Literal

Scope = Literal["stage", "construction"]
Mode = Literal["exact", "relaxed"]


@dataclass
class Check:
    """A verification function with metadata for use in a CheckSuite.

    Attributes:
        name: Check id (``"separation"``, ``"biholder"``, ...).
        description: First line of the function's docstring.
        fn: The checker. Stage-scoped checkers take ``(stage, schedule, space)``;
            construction-scoped checkers take ``(construction)``.
        scope: Whether the check runs once per stage or once per construction.
        modes: Schedule modes in which the check can certify.
        min_stage: First stage index the check applies to.
    """

    name: str
    description: str
    fn: Callable
    scope: Scope = "stage"
    modes: tuple[Mode, ...] = ("exact", "relaxed")
    min_stage: int = 0

    def __call__(self, *args: Any, **kwargs: Any) -> Any:
        return self.fn(*args, **kwargs)

    def certifies(self, mode: str) -> bool:
        return mode in self.modes

    def __repr__(self) -> str:
        return f"Check({self.name})"


def lemma_check(
    name: str,
    *,
    scope: Scope = "stage",
    modes: tuple[Mode, ...] = ("exact", "relaxed"),
    min_stage: int = 0,
) -> Callable[[Callable], Check]:
    """Decorator that registers a function as a Check.

    Usage:
        @lemma_check("separation", min_stage=1)
        def check_separation(stage, schedule, space):
            \"\"\"Far points have far images.\"\"\"
            ...

        @lemma_check("biholder", scope="construction", modes=("exact",))
        def check_biholder(construction):
            ...
    """
    if scope not in ("stage", "construction"):
        raise ValueError(f"scope must be 'stage' or 'construction', got {scope!r}")

    def _wrap(f: Callable) -> Check:
        doc = inspect.getdoc(f) or ""
        check = Check(
            name=name,
            description=doc.splitlines()[0] if doc else name,
            fn=f,
            scope=scope,
            modes=tuple(modes),
            min_stage=min_stage,
        )
        functools.update_wrapper(check, f)
        return check

    return _wrap
