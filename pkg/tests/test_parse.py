"""Surface syntax: parsing, printing, round trips."""

import pytest

from lfport import Lam, Nominal, O, alpha_eq, formula_alpha_eq
from lfport.lf import PiType, TermDecl, TypeDecl
from lfport.parse import (
    ParseError,
    parse_context,
    parse_formula,
    parse_schemas,
    parse_signature,
    parse_term_text,
    parse_type_text,
)
from lfport.pretty import (
    fmt_arity,
    fmt_ctx,
    fmt_formula,
    fmt_schema,
    fmt_signature,
    fmt_term,
    fmt_type,
)
from util import a, at, ce, nom


def test_signature_fixture_shape(sig_size):
    names = [d.name for d in sig_size.decls]
    assert names == [
        "nat", "z", "s", "plus", "plus-z", "plus-s",
        "tm", "app", "lam", "size", "size-app", "size-lam",
    ]
    assert isinstance(sig_size.decls[0], TypeDecl)
    assert isinstance(sig_size.decls[1], TermDecl)


def test_arrow_sugar_is_pi():
    sig = parse_signature("nat : Type. s : nat -> nat.")
    assert isinstance(sig.decls[1].type, PiType)


def test_signature_round_trip(sig_size):
    reparsed = parse_signature(fmt_signature(sig_size))
    assert len(reparsed.decls) == len(sig_size.decls)
    for d1, d2 in zip(sig_size.decls, reparsed.decls):
        assert d1.name == d2.name
        if isinstance(d1, TermDecl):
            assert alpha_eq(d1.type, d2.type)
        else:
            assert alpha_eq(d1.kind, d2.kind)


def test_schema_round_trip(schemas_stlc):
    for name, cs in schemas_stlc.items():
        text = f"schema {name} := {fmt_schema(cs)}."
        assert parse_schemas(text) == {name: cs}


def test_formula_round_trip(schemas_size, plus_closed, plus_body):
    for f in (plus_closed, plus_body):
        assert formula_alpha_eq(parse_formula(fmt_formula(f), schemas_size), f)


def test_term_round_trip():
    terms = [
        a("z"),
        a("s", a("s", a("z"))),
        a("app", a("lam", Lam("x", a("x"))), a(nom(1))),
        a("plus-s", a("z"), a("z"), a("z"), a("plus-z", a("z"))),
    ]
    for t in terms:
        assert alpha_eq(parse_term_text(fmt_term(t)), t)


def test_type_round_trip():
    types = [
        at("nat"),
        at("size", a(nom(1)), a("s", a("z"))),
        PiType("x", at("tm"), at("size", a("x"), a("s", a("z")))),
        PiType("x", PiType("y", at("tm"), at("tm")), at("nat")),
    ]
    for ty in types:
        assert alpha_eq(parse_type_text(fmt_type(ty), ce((nom(1), at("tm")))), ty)


def test_context_round_trip():
    g = ce((nom(1), at("tm")), (nom(2), at("size", a(nom(1)), a("s", a("z")))))
    assert parse_context(fmt_ctx(g)) == g


def test_empty_context():
    assert parse_context("") == ce()
    assert parse_context("% only a comment\n") == ce()


def test_arity_round_trip():
    from lfport.parse import _Parser

    for text in ("o", "o -> o", "(o -> o) -> o", "o -> o -> o"):
        p = _Parser(text)
        assert fmt_arity(p.arity()) == text


def test_parse_error_empty_classifier():
    with pytest.raises(ParseError):
        parse_signature("c : .")


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as exc:
        parse_signature("nat : Type.\nbad ! nat.")
    assert exc.value.line == 2


def test_comments_are_ignored():
    sig = parse_signature("% a comment\nnat : Type. % trailing\n")
    assert len(sig.decls) == 1


def test_nominal_names_resolve_to_bindings():
    g = parse_context("n1 : tm, n2 : size n1 (s z)")
    (n1, _), (n2, ty2) = g.bindings
    assert n1 == Nominal(O, 1)
    assert ty2.args[0] == a(n1)


def test_unbound_nominal_defaults_to_base_arity():
    t = parse_term_text("s n7")
    assert t == a("s", a(Nominal(O, 7)))


def test_duplicate_binders_renamed_apart():
    sig = parse_signature("nat : Type. k : {x : nat} {x : nat} nat.")
    ty = sig.decls[1].type
    assert ty.var != ty.body.var


def test_formula_shadowed_quantifiers_renamed(schemas_size):
    f = parse_formula("forall N : o. exists N : o. { |- N : nat }", schemas_size)
    assert f.var != f.body.var


def test_lambda_requires_parens_in_spine():
    t = parse_term_text("lam ([x] x)")
    assert fmt_term(t) == "lam ([x] x)"
    with pytest.raises(ParseError):
        parse_term_text("app [x] x z")


def test_unknown_schema_name_rejected():
    with pytest.raises(ParseError):
        parse_formula("ctx G : Nope. tt", {})


def test_formula_precedence(schemas_size):
    f = parse_formula("tt /\\ ff \\/ tt => ff", schemas_size)
    # parsed as ((tt /\ ff) \/ tt) => ff
    from lfport import Conj, Disj, Imp

    assert isinstance(f, Imp)
    assert isinstance(f.left, Disj)
    assert isinstance(f.left.left, Conj)
    assert formula_alpha_eq(parse_formula(fmt_formula(f), schemas_size), f)
