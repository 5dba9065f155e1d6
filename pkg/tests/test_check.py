"""Tests for check.py — Check class and @lemma_check decorator."""

import pytest

from ez_holder import Check, lemma_check
from ez_holder.verify import check_biholder, check_separation


def test_lemma_check_decorator():
    @lemma_check("gap")
    def check_gap(stage, schedule, space):
        """Consecutive points keep their gap.

        More detail that is not part of the description.
        """
        return "ok"

    assert isinstance(check_gap, Check)
    assert check_gap.name == "gap"
    assert check_gap.description == "Consecutive points keep their gap."
    assert check_gap.scope == "stage"
    assert check_gap.modes == ("exact", "relaxed")
    assert check_gap.min_stage == 0


def test_check_callable():
    @lemma_check("sum")
    def add(a, b):
        """Add."""
        return a + b

    assert add(3, 4) == 7
    assert add(a=10, b=20) == 30


def test_check_repr():
    @lemma_check("mine")
    def my_func(construction):
        """A check."""

    assert repr(my_func) == "Check(mine)"


def test_check_preserves_function_metadata():
    @lemma_check("documented")
    def documented_func(construction):
        """This is the docstring."""

    assert documented_func.__doc__ == "This is the docstring."
    assert documented_func.__wrapped__ is not None


def test_missing_docstring_falls_back_to_name():
    @lemma_check("bare", scope="construction")
    def bare(construction):
        return None

    assert bare.description == "bare"
    assert bare.scope == "construction"


def test_exact_only_check():
    @lemma_check("strict", modes=("exact",), min_stage=1)
    def strict(stage, schedule, space):
        """Exact constants only."""

    assert strict.certifies("exact")
    assert not strict.certifies("relaxed")
    assert strict.min_stage == 1


def test_bad_scope():
    with pytest.raises(ValueError, match="scope"):
        lemma_check("x", scope="pair")


def test_builtin_checks_are_registered():
    assert check_separation.name == "separation"
    assert check_separation.min_stage == 1
    assert check_biholder.scope == "construction"
    assert not check_biholder.certifies("relaxed")
