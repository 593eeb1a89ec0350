"""Core LF: erasure, hereditary substitution, formation judgements."""

import pytest

from lfport import (
    Arrow,
    Atom,
    Lam,
    LFContext,
    O,
    Signature,
    TermDecl,
    TYPE,
    TypeDecl,
    alpha_eq,
    apply_subst,
    arity_check_term,
    arity_check_type,
    check_context,
    check_signature,
    check_term,
    check_type,
    erase,
)
from lfport.lf import (
    ArgumentTypeMismatch,
    DuplicateName,
    HeadUnbound,
    IllFormedClassifier,
    IllFormedType,
    NotEtaLong,
    SpineArity,
    SubstFailure,
    TypeMismatch,
)
from util import a, at, ce, ctx, nom, pi


def test_erase_atomic():
    assert erase(at("nat")) == O


def test_erase_simple_arrow():
    assert erase(pi("x", at("tm"), at("tm"))) == Arrow(O, O)


def test_erase_dependent_chain():
    # {x : tm} size x (s z) -> size (M x) N erases to o -> o -> o
    inner = pi("y", at("size", a("x"), a("s", a("z"))), at("size", a("M", a("x")), a("N")))
    ty = pi("x", at("tm"), inner)
    assert erase(ty) == Arrow(O, Arrow(O, O))


def test_subst_no_redex():
    assert apply_subst(a("s", a("x")), {"x": (a("z"), O)}) == a("s", a("z"))


def test_subst_beta_contraction():
    out = apply_subst(a("f", a("z")), {"f": (Lam("y", a("y")), Arrow(O, O))})
    assert out == a("z")


def test_subst_arity_violation():
    with pytest.raises(SubstFailure):
        apply_subst(a("f", a("z")), {"f": (a("z"), O)})


def test_subst_grafts_atomic_replacement():
    out = apply_subst(a("f", a("z")), {"f": (a("g"), Arrow(O, O))})
    assert out == a("g", a("z"))


def test_subst_empty_is_identity():
    for e in (a("s", a("z")), Lam("x", a("x")), at("size", a("x"), a("z"))):
        assert apply_subst(e, {}) == e


def test_subst_composition_for_disjoint_parts():
    e = a("plus", a("x"), a("y"), a("z"))
    th1 = {"x": (a("z"), O)}
    th2 = {"y": (a("s", a("z")), O)}
    chained = apply_subst(apply_subst(e, th1), th2)
    joint = apply_subst(e, {**th1, **th2})
    assert chained == joint


def test_subst_avoids_capture():
    # ([y] x){x := y} must not capture the replacement
    out = apply_subst(Lam("y", a("x")), {"x": (a("y"), O)})
    assert isinstance(out, Lam)
    assert out.var != "y"
    assert out.body == a("y")


def test_subst_binder_rename_avoids_inner_binders():
    # renaming the outer binder away from the replacement must not pick a
    # name already used by an inner binder
    e = Lam("x", a("h", a("q"), Lam("x'", a("c", a("x")))))
    out = apply_subst(e, {"q": (a("x"), O)})
    inner = out.body.args[1]
    assert out.var not in ("x", "x'")
    assert inner.var == "x'"
    assert inner.body.args[0] == a(out.var)


def test_check_signature_fixture(sig_size):
    assert len(sig_size.decls) == 12
    check_signature(sig_size)


def test_check_signature_duplicate():
    sig = Signature((TypeDecl("nat", TYPE), TypeDecl("nat", TYPE)))
    with pytest.raises(DuplicateName):
        check_signature(sig)


def test_check_signature_undeclared_classifier():
    sig = Signature((TermDecl("c", at("d")),))
    with pytest.raises(IllFormedClassifier):
        check_signature(sig)


def test_check_context_size_block(sig_size):
    g = ctx((nom(1), at("tm")), (nom(2), at("size", a(nom(1)), a("s", a("z")))))
    check_context(sig_size, g)


def test_check_context_unbound_nominal(sig_size):
    g = ctx((nom(2), at("size", a(nom(1)), a("s", a("z")))))
    with pytest.raises(IllFormedType):
        check_context(sig_size, g)


def test_check_context_empty(sig_size):
    check_context(sig_size, LFContext())


def test_check_type_plus(sig_size):
    check_type(sig_size, LFContext(), at("plus", a("z"), a("z"), a("z")))


def test_check_type_underapplied(sig_size):
    with pytest.raises(SpineArity):
        check_type(sig_size, LFContext(), at("plus", a("z"), a("z")))


def test_check_type_argument_mismatch(sig_size):
    with pytest.raises(ArgumentTypeMismatch):
        check_type(sig_size, LFContext(), at("size", a("z"), a("z")))


def test_check_term_z(sig_size):
    check_term(sig_size, LFContext(), a("z"), at("nat"))


def test_check_term_plus_z(sig_size):
    check_term(sig_size, LFContext(), a("plus-z", a("z")), at("plus", a("z"), a("z"), a("z")))


def test_check_term_mismatch(sig_size):
    with pytest.raises(TypeMismatch):
        check_term(sig_size, LFContext(), a("z"), at("tm"))


def test_check_term_eta_long_required(sig_size):
    with pytest.raises(NotEtaLong):
        check_term(sig_size, LFContext(), a("s"), pi("x", at("nat"), at("nat")))


def test_check_term_unbound_head(sig_size):
    with pytest.raises(HeadUnbound):
        check_term(sig_size, LFContext(), a("q"), at("nat"))


def test_check_term_lambda(sig_size):
    check_term(sig_size, LFContext(), a("lam", Lam("x", a("x"))), at("tm"))


def test_check_term_alpha_invariance(sig_size):
    m1 = a("lam", Lam("x", a("x")))
    m2 = a("lam", Lam("y", a("y")))
    check_term(sig_size, LFContext(), m1, at("tm"))
    check_term(sig_size, LFContext(), m2, at("tm"))
    assert alpha_eq(m1, m2)


def test_checked_terms_arity_check(sig_size):
    actx = sig_size.arity_context()
    cases = [
        (a("z"), at("nat")),
        (a("s", a("z")), at("nat")),
        (a("plus-z", a("z")), at("plus", a("z"), a("z"), a("z"))),
        (a("lam", Lam("x", a("x"))), at("tm")),
    ]
    for term, ty in cases:
        check_term(sig_size, LFContext(), term, ty)
        assert arity_check_term(actx, term, erase(ty))


def test_arity_check_term_examples(sig_size):
    actx = sig_size.arity_context()
    assert arity_check_term(actx, a("s", a("z")), O)
    assert arity_check_term(actx, Lam("x", a("x")), Arrow(O, O))
    assert not arity_check_term(actx, a("s"), O)


def test_arity_check_type_examples(sig_size):
    actx = sig_size.arity_context()
    assert arity_check_type(actx, at("size", a("x"), a("s", a("z"))), {"x": O})
    assert arity_check_type(actx, at("nat"))
    assert not arity_check_type(actx, at("size", a("z")))


def test_nominal_arity_is_intrinsic(sig_size):
    actx = sig_size.arity_context()
    assert arity_check_term(actx, a(nom(1)), O)
    assert arity_check_term(actx, a(nom(1, Arrow(O, O)), a("z")), O)


def test_dependent_spine_plus_s(sig_size):
    d = a("plus-s", a("z"), a("z"), a("z"), a("plus-z", a("z")))
    check_term(sig_size, LFContext(), d, at("plus", a("s", a("z")), a("z"), a("s", a("z"))))
    with pytest.raises(TypeMismatch):
        check_term(
            sig_size, LFContext(), d,
            at("plus", a("s", a("z")), a("z"), a("s", a("s", a("z")))),
        )


def test_size_derivation_for_identity_function(sig_size):
    # size-lam ([x] x) (s z) ([x][d] d) derives size (lam ([x] x)) (s (s z))
    d = a("size-lam", Lam("x", a("x")), a("s", a("z")), Lam("x", Lam("d", a("d"))))
    good = at("size", a("lam", Lam("x", a("x"))), a("s", a("s", a("z"))))
    check_term(sig_size, LFContext(), d, good)
    bad = at("size", a("lam", Lam("x", a("x"))), a("s", a("z")))
    with pytest.raises(TypeMismatch):
        check_term(sig_size, LFContext(), d, bad)


def test_substitution_preserves_arity_typing(sig_size):
    # randomized subject reduction for arity typing: substituting an
    # arity-correct closed term keeps the result arity-correct
    import random

    from lfport.schema import term_pool

    actx = sig_size.arity_context()
    rng = random.Random(5)
    oo = Arrow(O, O)
    open_terms = [
        (a("s", a("v1")), O, {"v1": O}),
        (a("plus-s", a("v1"), a("z"), a("v2"), a("v3")), O, {"v1": O, "v2": O, "v3": O}),
        (Lam("x", a("f1", a("x"))), oo, {"f1": oo}),
        (a("app", a("f1", a("v1")), a("f1", a("z"))), O, {"f1": oo, "v1": O}),
        (a("lam", Lam("x", a("f1", a("app", a("x"), a("v1"))))), O, {"f1": oo, "v1": O}),
    ]
    pools = {O: term_pool(sig_size, O, 4), oo: term_pool(sig_size, oo, 4)}
    for term, arity, free in open_terms:
        assert arity_check_term(actx, term, arity, free)
        for _ in range(40):
            subst = {
                v: (rng.choice(pools[ar]), ar) for v, ar in free.items()
            }
            out = apply_subst(term, subst)
            assert arity_check_term(actx, out, arity)
