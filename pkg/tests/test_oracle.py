"""Bounded validity and the metatheorem harnesses."""

import pytest

from lfport import (
    Bot,
    Bounds,
    ExistsTm,
    Holds,
    O,
    SubordRel,
    Top,
    bounded_validity,
    verify_minimization,
    verify_transport,
)
from lfport.oracle import INVALID, UNKNOWN, VALID, OracleReport
from util import a, at, ce, nom


def test_bounds_validation():
    with pytest.raises(ValueError):
        Bounds(0, 1)
    with pytest.raises(ValueError):
        Bounds(1, 1, -1)


def test_atom_from_the_plus_example(sig_size, rel_size):
    f = Holds(ce(), a("plus-z", a("z")), at("plus", a("z"), a("z"), a("z")))
    assert bounded_validity(sig_size, rel_size, f, Bounds(2, 1)).value == VALID


def test_top_and_bottom(sig_size, rel_size):
    assert bounded_validity(sig_size, rel_size, Top(), Bounds(1, 1)).value == VALID
    assert bounded_validity(sig_size, rel_size, Bot(), Bounds(1, 1)).value == INVALID


def test_existential_finds_z(sig_size, rel_size):
    f = ExistsTm("N", O, Holds(ce(), a("N"), at("nat")))
    verdict = bounded_validity(sig_size, rel_size, f, Bounds(1, 1))
    assert verdict.value == VALID


def test_existential_valid_is_monotone_in_bounds(sig_size, rel_size):
    f = ExistsTm("N", O, Holds(ce(), a("N"), at("nat")))
    for size in (1, 2, 3, 4):
        assert bounded_validity(sig_size, rel_size, f, Bounds(size, 1)).value == VALID


def test_universal_never_claims_valid(sig_size, rel_size, plus_closed):
    verdict = bounded_validity(sig_size, rel_size, plus_closed, Bounds(3, 2))
    assert verdict.value == UNKNOWN


def test_ill_formed_atom_is_invalid(sig_size, rel_size):
    f = Holds(ce((nom(2), at("size", a(nom(1)), a("s", a("z"))))), a("z"), at("nat"))
    assert bounded_validity(sig_size, rel_size, f, Bounds(2, 1)).value == INVALID


def test_validity_deterministic(sig_size, rel_size, plus_closed):
    v1 = bounded_validity(sig_size, rel_size, plus_closed, Bounds(3, 2))
    v2 = bounded_validity(sig_size, rel_size, plus_closed, Bounds(3, 2))
    assert v1 == v2


def test_validity_alpha_stable(sig_size, rel_size):
    f1 = ExistsTm("N", O, Holds(ce(), a("N"), at("nat")))
    f2 = ExistsTm("M", O, Holds(ce(), a("M"), at("nat")))
    b = Bounds(2, 1)
    assert bounded_validity(sig_size, rel_size, f1, b).value == bounded_validity(
        sig_size, rel_size, f2, b
    ).value


def test_verify_minimization_small(sig_size, rel_size):
    report = verify_minimization(sig_size, rel_size, Bounds(3, 2))
    assert report.passed
    assert report.checked > 0


def test_verify_minimization_detects_corrupted_relation(sig_size, rel_size):
    broken = SubordRel(
        frozenset(p for p in rel_size.pairs if p != ("nat", "nat")),
        rel_size.constants,
    )
    report = verify_minimization(sig_size, broken, Bounds(3, 2))
    assert not report.passed
    assert report.counterexamples


def test_verify_transport_identity(sig_size, rel_size, schemas_size, plus_body):
    report = verify_transport(
        sig_size,
        rel_size,
        schemas_size["Csize"],
        schemas_size["Csize"],
        "G",
        plus_body,
        Bounds(2, 1),
    )
    assert report.passed


def test_verify_transport_refuses_without_certificate(
    sig_size, rel_size, schemas_size, plus_body
):
    report = verify_transport(
        sig_size,
        rel_size,
        schemas_size["Csize"],
        schemas_size["Cempty"],
        "G",
        plus_body,
        Bounds(2, 1),
    )
    assert report.refused is not None
    assert not report.passed


def test_report_rendering():
    report = OracleReport("demo")
    report.record("first", True)
    report.record("second", False, "detail")
    text = report.render()
    assert "counterexample: second: detail" in text
    assert text.endswith("FAIL (2 obligations, 1 counterexamples)")
