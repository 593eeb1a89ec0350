"""Reasoning-level formulas over LF typing judgements.

Formulas quantify over terms (at arity types) and over contexts (at context
schemas); the atomic formula asserts a typing judgement together with the
well-formedness of its context and type.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .lf import (
    Arity,
    Atom,
    AtomicType,
    Lam,
    LFError,
    PiType,
    Signature,
    Term,
    TypeExpr,
    alpha_key,
    apply_subst,
    arity_check_term,
    arity_check_type,
    erase,
    free_vars,
    fresh_name,
    names_in,
)
from .schema import ContextSchema, CtxExpr


class UnboundContextVariable(LFError):
    pass


class UnboundTermVariable(LFError):
    pass


class ArityCheckFailure(LFError):
    pass


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Holds(Formula):
    """Atomic formula: the term inhabits the type in the context expression."""

    ctx: CtxExpr
    term: Term
    ty: TypeExpr


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Conj(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Disj(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ForallTm(Formula):
    var: str
    arity: Arity
    body: Formula


@dataclass(frozen=True)
class ExistsTm(Formula):
    var: str
    arity: Arity
    body: Formula


@dataclass(frozen=True)
class ForallCtx(Formula):
    var: str
    schema: ContextSchema
    body: Formula
    schema_name: Optional[str] = field(default=None, compare=False)


TOP = Top()
BOT = Bot()


@dataclass(frozen=True)
class WfEnv:
    """Ambient arity assignment for term variables and schema assignment for
    context variables."""

    term_arities: Mapping[str, Arity] = field(default_factory=dict)
    ctx_schemas: Mapping[str, ContextSchema] = field(default_factory=dict)


EMPTY_ENV = WfEnv()


# ---------------------------------------------------------------------------
# Well-formedness.


def check_formula(sig: Signature, f: Formula, env: WfEnv = EMPTY_ENV) -> None:
    actx = sig.arity_context()
    _check(sig, actx, f, dict(env.term_arities), set(env.ctx_schemas))


def _check(sig, actx, f, tscope: dict, cscope: set) -> None:
    match f:
        case Holds(ctx, term, ty):
            if ctx.head is not None and ctx.head not in cscope:
                raise UnboundContextVariable(
                    f"context variable {ctx.head} is not bound"
                )
            for _, bty in ctx.bindings:
                _scan_names(sig, bty, set(tscope))
                if not arity_check_type(actx, bty, tscope):
                    raise ArityCheckFailure(f"context binding type {bty!r}")
            _scan_names(sig, term, set(tscope))
            _scan_names(sig, ty, set(tscope))
            if not arity_check_type(actx, ty, tscope):
                raise ArityCheckFailure(f"type {ty!r} does not arity-kind")
            if not arity_check_term(actx, term, erase(ty), tscope):
                raise ArityCheckFailure(
                    f"term {term!r} does not arity-check at {erase(ty)!r}"
                )
        case Top() | Bot():
            pass
        case Imp(l, r) | Conj(l, r) | Disj(l, r):
            _check(sig, actx, l, tscope, cscope)
            _check(sig, actx, r, tscope, cscope)
        case ForallTm(v, ar, body) | ExistsTm(v, ar, body):
            _check(sig, actx, body, {**tscope, v: ar}, cscope)
        case ForallCtx(v, _, body):
            _check(sig, actx, body, tscope, cscope | {v})
        case _:
            raise TypeError(f"not a formula: {f!r}")


def _scan_names(sig, e, scope: set) -> None:
    """Reject free term names that are neither in scope nor declared."""
    match e:
        case Atom(head, args):
            if isinstance(head, str) and head not in scope and sig.type_of(head) is None:
                raise UnboundTermVariable(f"name {head} is not bound")
            for a in args:
                _scan_names(sig, a, scope)
        case Lam(var, body):
            _scan_names(sig, body, scope | {var})
        case AtomicType(_, args):
            for a in args:
                _scan_names(sig, a, scope)
        case PiType(var, domain, body):
            _scan_names(sig, domain, scope)
            _scan_names(sig, body, scope | {var})


# ---------------------------------------------------------------------------
# Substitution of context expressions for context variables.


def free_ctx_vars(f: Formula) -> set[str]:
    match f:
        case Holds(ctx, _, _):
            return {ctx.head} if ctx.head is not None else set()
        case Top() | Bot():
            return set()
        case Imp(l, r) | Conj(l, r) | Disj(l, r):
            return free_ctx_vars(l) | free_ctx_vars(r)
        case ForallTm(_, _, body) | ExistsTm(_, _, body):
            return free_ctx_vars(body)
        case ForallCtx(v, _, body):
            return free_ctx_vars(body) - {v}
    raise TypeError(f"not a formula: {f!r}")


def rename_ctx_var(f: Formula, old: str, new: str) -> Formula:
    match f:
        case Holds(ctx, term, ty):
            if ctx.head == old:
                return Holds(CtxExpr(new, ctx.bindings), term, ty)
            return f
        case Top() | Bot():
            return f
        case Imp(l, r):
            return Imp(rename_ctx_var(l, old, new), rename_ctx_var(r, old, new))
        case Conj(l, r):
            return Conj(rename_ctx_var(l, old, new), rename_ctx_var(r, old, new))
        case Disj(l, r):
            return Disj(rename_ctx_var(l, old, new), rename_ctx_var(r, old, new))
        case ForallTm(v, ar, body):
            return ForallTm(v, ar, rename_ctx_var(body, old, new))
        case ExistsTm(v, ar, body):
            return ExistsTm(v, ar, rename_ctx_var(body, old, new))
        case ForallCtx(v, cs, body, name):
            if v == old:
                return f
            return ForallCtx(v, cs, rename_ctx_var(body, old, new), name)
    raise TypeError(f"not a formula: {f!r}")


def subst_ctx(f: Formula, sigma: Mapping[str, CtxExpr]) -> Formula:
    """Replace free context variables by context expressions; the explicit
    bindings at an occurrence are appended after the replacement's."""
    if not sigma:
        return f
    match f:
        case Holds(ctx, term, ty):
            if ctx.head is not None and ctx.head in sigma:
                repl = sigma[ctx.head]
                return Holds(
                    CtxExpr(repl.head, repl.bindings + ctx.bindings), term, ty
                )
            return f
        case Top() | Bot():
            return f
        case Imp(l, r):
            return Imp(subst_ctx(l, sigma), subst_ctx(r, sigma))
        case Conj(l, r):
            return Conj(subst_ctx(l, sigma), subst_ctx(r, sigma))
        case Disj(l, r):
            return Disj(subst_ctx(l, sigma), subst_ctx(r, sigma))
        case ForallTm(v, ar, body):
            return ForallTm(v, ar, subst_ctx(body, sigma))
        case ExistsTm(v, ar, body):
            return ExistsTm(v, ar, subst_ctx(body, sigma))
        case ForallCtx(v, cs, body, name):
            inner = {k: g for k, g in sigma.items() if k != v}
            if not inner:
                return f
            range_heads = {g.head for g in inner.values() if g.head is not None}
            if v in range_heads:
                v2 = fresh_name(v, range_heads | ctx_var_names(body) | set(inner))
                body = rename_ctx_var(body, v, v2)
                v = v2
            return ForallCtx(v, cs, subst_ctx(body, inner), name)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Substitution of terms for term variables.


def subst_terms(f: Formula, theta: Mapping[str, tuple[Term, Arity]]) -> Formula:
    """Distribute an arity-indexed substitution over a formula, including
    the types in explicit context bindings."""
    if not theta:
        return f
    match f:
        case Holds(ctx, term, ty):
            bindings = tuple((n, apply_subst(t, theta)) for n, t in ctx.bindings)
            return Holds(
                CtxExpr(ctx.head, bindings),
                apply_subst(term, theta),
                apply_subst(ty, theta),
            )
        case Top() | Bot():
            return f
        case Imp(l, r):
            return Imp(subst_terms(l, theta), subst_terms(r, theta))
        case Conj(l, r):
            return Conj(subst_terms(l, theta), subst_terms(r, theta))
        case Disj(l, r):
            return Disj(subst_terms(l, theta), subst_terms(r, theta))
        case ForallTm(v, ar, body):
            v, body, inner = _shield_binder(v, body, theta)
            return ForallTm(v, ar, subst_terms(body, inner) if inner else body)
        case ExistsTm(v, ar, body):
            v, body, inner = _shield_binder(v, body, theta)
            return ExistsTm(v, ar, subst_terms(body, inner) if inner else body)
        case ForallCtx(v, cs, body, name):
            return ForallCtx(v, cs, subst_terms(body, theta), name)
    raise TypeError(f"not a formula: {f!r}")


def _shield_binder(var, body, theta):
    inner = {k: v for k, v in theta.items() if k != var}
    if not inner:
        return var, body, inner
    range_free: set[str] = set()
    for t, _ in inner.values():
        range_free |= free_vars(t)
    if var in range_free:
        var2 = fresh_name(var, range_free | formula_term_names(body) | set(inner))
        body = _rename_term_var(body, var, var2)
        var = var2
    return var, body, inner


def free_term_vars(f: Formula) -> set[str]:
    """Free term-level names of a formula (variables and constants alike)."""
    match f:
        case Holds(ctx, term, ty):
            out = free_vars(term) | free_vars(ty)
            for _, bty in ctx.bindings:
                out |= free_vars(bty)
            return out
        case Top() | Bot():
            return set()
        case Imp(l, r) | Conj(l, r) | Disj(l, r):
            return free_term_vars(l) | free_term_vars(r)
        case ForallTm(v, _, body) | ExistsTm(v, _, body):
            return free_term_vars(body) - {v}
        case ForallCtx(_, _, body):
            return free_term_vars(body)
    raise TypeError(f"not a formula: {f!r}")


def formula_term_names(f: Formula) -> set[str]:
    """Every term-level name in a formula, bound or free."""
    match f:
        case Holds(ctx, term, ty):
            out = names_in(term) | names_in(ty)
            for _, bty in ctx.bindings:
                out |= names_in(bty)
            return out
        case Top() | Bot():
            return set()
        case Imp(l, r) | Conj(l, r) | Disj(l, r):
            return formula_term_names(l) | formula_term_names(r)
        case ForallTm(v, _, body) | ExistsTm(v, _, body):
            return formula_term_names(body) | {v}
        case ForallCtx(_, _, body):
            return formula_term_names(body)
    raise TypeError(f"not a formula: {f!r}")


def ctx_var_names(f: Formula) -> set[str]:
    """Every context-variable name in a formula, bound or free."""
    match f:
        case Holds(ctx, _, _):
            return {ctx.head} if ctx.head is not None else set()
        case Top() | Bot():
            return set()
        case Imp(l, r) | Conj(l, r) | Disj(l, r):
            return ctx_var_names(l) | ctx_var_names(r)
        case ForallTm(_, _, body) | ExistsTm(_, _, body):
            return ctx_var_names(body)
        case ForallCtx(v, _, body):
            return ctx_var_names(body) | {v}
    raise TypeError(f"not a formula: {f!r}")


def _rename_term_var(f: Formula, old: str, new: str) -> Formula:
    from .lf import rename_var

    match f:
        case Holds(ctx, term, ty):
            bindings = tuple((n, rename_var(t, old, new)) for n, t in ctx.bindings)
            return Holds(
                CtxExpr(ctx.head, bindings),
                rename_var(term, old, new),
                rename_var(ty, old, new),
            )
        case Top() | Bot():
            return f
        case Imp(l, r):
            return Imp(_rename_term_var(l, old, new), _rename_term_var(r, old, new))
        case Conj(l, r):
            return Conj(_rename_term_var(l, old, new), _rename_term_var(r, old, new))
        case Disj(l, r):
            return Disj(_rename_term_var(l, old, new), _rename_term_var(r, old, new))
        case ForallTm(v, ar, body):
            if v == old:
                return f
            return ForallTm(v, ar, _rename_term_var(body, old, new))
        case ExistsTm(v, ar, body):
            if v == old:
                return f
            return ExistsTm(v, ar, _rename_term_var(body, old, new))
        case ForallCtx(v, cs, body, name):
            return ForallCtx(v, cs, _rename_term_var(body, old, new), name)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Alpha equivalence for formulas (term and context binders).


def formula_key(f: Formula, tenv: tuple = (), cenv: tuple = ()):
    match f:
        case Holds(ctx, term, ty):
            if ctx.head is None:
                hk = None
            else:
                idx = _env_index(ctx.head, cenv)
                hk = ("b", idx) if idx is not None else ("f", ctx.head)
            bnd = tuple(
                ((n.arity, n.index), alpha_key(t, tenv)) for n, t in ctx.bindings
            )
            return ("holds", hk, bnd, alpha_key(term, tenv), alpha_key(ty, tenv))
        case Top():
            return ("top",)
        case Bot():
            return ("bot",)
        case Imp(l, r):
            return ("imp", formula_key(l, tenv, cenv), formula_key(r, tenv, cenv))
        case Conj(l, r):
            return ("and", formula_key(l, tenv, cenv), formula_key(r, tenv, cenv))
        case Disj(l, r):
            return ("or", formula_key(l, tenv, cenv), formula_key(r, tenv, cenv))
        case ForallTm(v, ar, body):
            return ("all", ar, formula_key(body, tenv + (v,), cenv))
        case ExistsTm(v, ar, body):
            return ("ex", ar, formula_key(body, tenv + (v,), cenv))
        case ForallCtx(v, cs, body):
            return ("ctxall", cs, formula_key(body, tenv, cenv + (v,)))
    raise TypeError(f"not a formula: {f!r}")


def _env_index(name, env):
    for i in range(len(env) - 1, -1, -1):
        if env[i] == name:
            return len(env) - 1 - i
    return None


def formula_alpha_eq(f: Formula, g: Formula) -> bool:
    return formula_key(f) == formula_key(g)
