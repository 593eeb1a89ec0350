"""Schema subsumption and the theorem-transportation check.

The pipeline: a type is subordinate to a formula when it can influence some
typing judgement in it; context expressions subsume one another when the
extra bindings are not subordinate to the formula; block declarations prune
relative to a schema when dropped entries cannot feed any type the schema
can still generate.  Schema subsumption searches block variants that align
a target block with a source block under both relations, and the transport
check combines that search with the structural validity analysis for
ill-formed context substitutions.  Every search result is recorded in a
replayable certificate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .formula import (
    Bot,
    Conj,
    Disj,
    ExistsTm,
    ForallCtx,
    ForallTm,
    Formula,
    Holds,
    Imp,
    Top,
    WfEnv,
    check_formula,
)
from .lf import (
    Arity,
    Atom,
    AtomicType,
    LFError,
    Nominal,
    O,
    PiType,
    Signature,
    TypeExpr,
    alpha_eq,
    apply_subst,
    erase,
)
from .schema import (
    BlockSchema,
    ContextSchema,
    CtxExpr,
    check_schema,
    segment_instance,
)
from .subord import SubordRel, head_constant, type_leq


class SearchCapExceeded(LFError):
    pass


class SegmentationMismatch(LFError):
    pass


class IllFormedInput(LFError):
    pass


# ---------------------------------------------------------------------------
# Subordination of a type by a formula.


def tf_subord(rel: SubordRel, ty: TypeExpr, f: Formula, gamma: str) -> bool:
    """Whether the type can influence some judgement of `f` whose context is
    headed by `gamma`.  Atoms headed by a different context variable (or by
    none) contribute nothing; an atom with explicit bindings after `gamma`
    counts unconditionally."""
    match f:
        case Holds(ctx, _, a):
            if ctx.head != gamma:
                return False
            if ctx.bindings:
                return True
            return type_leq(rel, ty, a)
        case Top() | Bot():
            return False
        case Imp(l, r) | Conj(l, r) | Disj(l, r):
            return tf_subord(rel, ty, l, gamma) or tf_subord(rel, ty, r, gamma)
        case ForallTm(_, _, body) | ExistsTm(_, _, body):
            return tf_subord(rel, ty, body, gamma)
        case ForallCtx(v, _, body):
            return v != gamma and tf_subord(rel, ty, body, gamma)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Context-expression subsumption and pruning.

Binding = tuple  # (str | Nominal, TypeExpr)


def ce_subsumes(rel: SubordRel, gamma: str, small, big, f: Formula) -> bool:
    """The binding list `small` retains everything in `big` that matters for
    `f`: working right to left, each binding of `big` is either matched
    exactly or dropped because its type is not subordinate to `f`.  Both
    options are explored."""
    small = tuple(small)
    big = tuple(big)

    def go(i: int, j: int) -> bool:
        if j == 0:
            return i == 0
        name, ty = big[j - 1]
        if (
            i > 0
            and small[i - 1][0] == name
            and alpha_eq(small[i - 1][1], ty)
            and go(i - 1, j - 1)
        ):
            return True
        return (not tf_subord(rel, ty, f, gamma)) and go(i, j - 1)

    return go(len(small), len(big))


def prune_ok(rel: SubordRel, schema: ContextSchema, small, big) -> bool:
    """Pruning relative to a schema: a dropped entry's type must not be
    subordinate to any type assigned in any block declaration of the
    schema (so later schema-generated bindings cannot depend on it)."""
    small = tuple(small)
    big = tuple(big)
    schema_types = [ty for block in schema.blocks for _, ty in block.decl]

    def droppable(ty: TypeExpr) -> bool:
        return all(not type_leq(rel, ty, other) for other in schema_types)

    def go(i: int, j: int) -> bool:
        if j == 0:
            return i == 0
        name, ty = big[j - 1]
        if (
            i > 0
            and small[i - 1][0] == name
            and alpha_eq(small[i - 1][1], ty)
            and go(i - 1, j - 1)
        ):
            return True
        return droppable(ty) and go(i, j - 1)

    return go(len(small), len(big))


# ---------------------------------------------------------------------------
# Block-schema variants.


def perm_subst(perm: Mapping[str, str], arities: Mapping[str, Arity]) -> dict:
    """The substitution a variable permutation induces under an arity
    context: each moved variable is replaced at its assigned arity (base
    arity when unassigned)."""
    return {
        x: (Atom(z), arities.get(x, O))
        for x, z in perm.items()
        if x != z
    }


def blkctx(sig: Signature, block: BlockSchema) -> dict[str, Arity]:
    """Arity assignment a block schema induces: the erased signature plus
    the block's parameters and the erasures of its declaration types."""
    out = dict(sig.arity_context().terms)
    out.update(dict(block.params))
    for y, ty in block.decl:
        out[y] = erase(ty)
    return out


def make_variant(sig: Signature, perm: Mapping[str, str], block: BlockSchema) -> BlockSchema:
    """Rename a block schema through a variable permutation: parameters and
    declaration variables move, declaration types are rewritten through the
    induced permutation substitution."""
    ps = perm_subst(perm, blkctx(sig, block))
    params = tuple((perm.get(x, x), ar) for x, ar in block.params)
    decl = tuple((perm.get(y, y), apply_subst(ty, ps)) for y, ty in block.decl)
    return BlockSchema(params, decl)


# ---------------------------------------------------------------------------
# Schema subsumption search.


@dataclass(frozen=True)
class DropRecord:
    position: int
    var: str
    ty: TypeExpr
    formula_facts: tuple[tuple[str, str], ...]
    schema_facts: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class BlockMatch:
    target_index: int
    source_index: int
    permutation: tuple[tuple[str, str], ...]
    variant: BlockSchema
    keep_positions: tuple[int, ...]
    drops: tuple[DropRecord, ...]


@dataclass(frozen=True)
class SubsumptionFailure:
    target_index: int
    block: BlockSchema
    undroppable: Optional[tuple[str, TypeExpr]]
    message: str


def _gamma_atom_types(f: Formula, gamma: str) -> list[TypeExpr]:
    """Types of the `gamma`-headed atoms with no explicit bindings."""
    out: list[TypeExpr] = []

    def walk(g: Formula):
        match g:
            case Holds(ctx, _, a):
                if ctx.head == gamma and not ctx.bindings:
                    out.append(a)
            case Imp(l, r) | Conj(l, r) | Disj(l, r):
                walk(l)
                walk(r)
            case ForallTm(_, _, body) | ExistsTm(_, _, body):
                walk(body)
            case ForallCtx(v, _, body):
                if v != gamma:
                    walk(body)

    walk(f)
    return out


def _derive_renaming(src, tgt, tgt_vars: set, src_vars: set, mapping: dict, bp=()) -> bool:
    """Structurally match a source declaration type against a target one,
    accumulating a renaming of target schema variables to source names."""
    match src, tgt:
        case (PiType(v1, d1, b1), PiType(v2, d2, b2)):
            return _derive_renaming(d1, d2, tgt_vars, src_vars, mapping, bp) and \
                _derive_renaming(b1, b2, tgt_vars, src_vars, mapping, bp + ((v1, v2),))
        case (AtomicType(h1, a1), AtomicType(h2, a2)):
            if h1 != h2 or len(a1) != len(a2):
                return False
            return all(
                _derive_renaming_term(p, t, tgt_vars, src_vars, mapping, bp)
                for p, t in zip(a1, a2)
            )
    return False


def _derive_renaming_term(src, tgt, tgt_vars, src_vars, mapping, bp) -> bool:
    from .lf import Lam

    match src, tgt:
        case (Atom(h1, a1), Atom(h2, a2)):
            if len(a1) != len(a2):
                return False
            i1 = _bindex(h1, [p for p, _ in bp])
            i2 = _bindex(h2, [t for _, t in bp])
            if (i1 is None) != (i2 is None) or (i1 is not None and i1 != i2):
                return False
            if i1 is None:
                if isinstance(h1, Nominal) or isinstance(h2, Nominal):
                    if h1 != h2:
                        return False
                elif h2 in tgt_vars:
                    if h1 not in src_vars:
                        return False
                    if mapping.setdefault(h2, h1) != h1:
                        return False
                elif h1 != h2 or h1 in src_vars:
                    return False
            return all(
                _derive_renaming_term(p, t, tgt_vars, src_vars, mapping, bp)
                for p, t in zip(a1, a2)
            )
        case (Lam(v1, b1), Lam(v2, b2)):
            return _derive_renaming_term(
                b1, b2, tgt_vars, src_vars, mapping, bp + ((v1, v2),)
            )
    return False


def _bindex(name, seq):
    for i in range(len(seq) - 1, -1, -1):
        if seq[i] == name:
            return len(seq) - 1 - i
    return None


def _close_permutation(mapping: Mapping[str, str]) -> dict[str, str]:
    """Extend an injective renaming to a bijection on its support."""
    keys = set(mapping)
    values = set(mapping.values())
    perm = dict(mapping)
    for v, k in zip(sorted(values - keys), sorted(keys - values)):
        perm[v] = k
    return perm


def _decl_subsequence_eq(sdecl, kept) -> bool:
    return len(sdecl) == len(kept) and all(
        sy == ky and alpha_eq(sty, kty)
        for (sy, sty), (ky, kty) in zip(sdecl, kept)
    )


def block_subsumes(
    rel: SubordRel,
    sig: Signature,
    target: BlockSchema,
    f: Formula,
    gamma: str,
    source: ContextSchema,
    search_cap: int = 10000,
    target_index: int = 0,
) -> Optional[BlockMatch]:
    """Find a source block and a variant of the target block whose
    declaration both prunes (relative to the whole source schema) and
    ce-subsumes into the source declaration.

    Candidate alignments embed the source declaration as a subsequence of
    the target's; the renaming is derived by structural matching and closed
    into a permutation.  First hit wins.
    """
    atom_types = _gamma_atom_types(f, gamma)
    schema_types = [ty for block in source.blocks for _, ty in block.decl]
    tdecl = target.decl
    tgt_vars = {v for v, _ in target.params} | {y for y, _ in tdecl}
    attempts = 0
    for si, src in enumerate(source.blocks):
        sdecl = src.decl
        src_vars = {v for v, _ in src.params} | {y for y, _ in sdecl}
        if len(sdecl) > len(tdecl):
            continue
        for keep in itertools.combinations(range(len(tdecl)), len(sdecl)):
            attempts += 1
            if attempts > search_cap:
                raise SearchCapExceeded(
                    f"variant search exceeded {search_cap} alignment attempts"
                )
            mapping: dict[str, str] = {}
            ok = True
            for (sy, sty), ti in zip(sdecl, keep):
                ty_name, tty = tdecl[ti]
                if not _derive_renaming(sty, tty, tgt_vars, src_vars, mapping):
                    ok = False
                    break
                if mapping.setdefault(ty_name, sy) != sy:
                    ok = False
                    break
            if not ok:
                continue
            if len(set(mapping.values())) != len(mapping):
                continue
            perm = _close_permutation(mapping)
            variant = make_variant(sig, perm, target)
            vdecl = variant.decl
            if not _decl_subsequence_eq(sdecl, [vdecl[i] for i in keep]):
                continue
            if not prune_ok(rel, source, sdecl, vdecl):
                continue
            if not ce_subsumes(rel, gamma, sdecl, vdecl, f):
                continue
            drops = []
            for pos, (dv, dty) in enumerate(vdecl):
                if pos in keep:
                    continue
                h = head_constant(dty)
                formula_facts = tuple(
                    sorted({(h, head_constant(a)) for a in atom_types})
                )
                schema_facts = tuple(
                    sorted({(h, head_constant(a)) for a in schema_types})
                )
                drops.append(DropRecord(pos, dv, dty, formula_facts, schema_facts))
            return BlockMatch(
                target_index,
                si,
                tuple(sorted(perm.items())),
                variant,
                keep,
                tuple(drops),
            )
    return None


def _diagnose_block(rel, target: BlockSchema, f, gamma, source: ContextSchema):
    """Name a binding that blocks the match: undroppable (by the formula or
    the schema) and without a counterpart in any source declaration."""
    schema_types = [ty for block in source.blocks for _, ty in block.decl]
    for var, ty in target.decl:
        by_formula = tf_subord(rel, ty, f, gamma)
        by_schema = any(type_leq(rel, ty, other) for other in schema_types)
        if not (by_formula or by_schema):
            continue
        present = False
        for block in source.blocks:
            src_vars = {v for v, _ in block.params} | {y for y, _ in block.decl}
            for _, sty in block.decl:
                m: dict[str, str] = {}
                if _derive_renaming(
                    sty,
                    ty,
                    {v for v, _ in target.params} | {y for y, _ in target.decl},
                    src_vars,
                    m,
                ):
                    present = True
                    break
            if present:
                break
        if not present:
            return (var, ty)
    return None


def schema_subsumes(
    rel: SubordRel,
    sig: Signature,
    source: ContextSchema,
    f: Formula,
    gamma: str,
    target: ContextSchema,
    search_cap: int = 10000,
) -> Union[tuple[BlockMatch, ...], SubsumptionFailure]:
    """Every target block must have a variant that block-subsumes into the
    source schema; an empty target succeeds unconditionally."""
    matches = []
    for ti, block in enumerate(target.blocks):
        m = block_subsumes(
            rel, sig, block, f, gamma, source, search_cap, target_index=ti
        )
        if m is None:
            binding = _diagnose_block(rel, block, f, gamma, source)
            if binding is not None:
                msg = f"binding {binding[0]} cannot be dropped or matched"
            else:
                msg = "no source block declaration embeds into this block"
            return SubsumptionFailure(ti, block, binding, msg)
        matches.append(m)
    return tuple(matches)


# ---------------------------------------------------------------------------
# Structural validity analysis for ill-formed context substitutions.


def _val_pos_deriv(gamma: str, f: Formula):
    match f:
        case Top():
            return ("top",)
        case Conj(l, r):
            dl = _val_pos_deriv(gamma, l)
            dr = _val_pos_deriv(gamma, r)
            if dl is not None and dr is not None:
                return ("and", dl, dr)
            return None
        case Disj(l, r):
            dl = _val_pos_deriv(gamma, l)
            if dl is not None:
                return ("or-left", dl)
            dr = _val_pos_deriv(gamma, r)
            if dr is not None:
                return ("or-right", dr)
            return None
        case Imp(l, r):
            dl = _val_neg_deriv(gamma, l)
            if dl is not None:
                return ("imp-antecedent", dl)
            dr = _val_pos_deriv(gamma, r)
            if dr is not None:
                return ("imp-consequent", dr)
            return None
        case ForallTm(_, _, body):
            d = _val_pos_deriv(gamma, body)
            return ("all", d) if d is not None else None
        case ExistsTm(_, _, body):
            d = _val_pos_deriv(gamma, body)
            return ("ex", d) if d is not None else None
        case ForallCtx(v, _, body):
            if v == gamma:
                return None
            d = _val_pos_deriv(gamma, body)
            return ("ctx", d) if d is not None else None
        case Holds() | Bot():
            return None
    raise TypeError(f"not a formula: {f!r}")


def _val_neg_deriv(gamma: str, f: Formula):
    match f:
        case Bot():
            return ("bot",)
        case Holds(ctx, _, _):
            if ctx.head == gamma:
                return ("atom",)
            return None
        case Imp(l, r):
            dl = _val_pos_deriv(gamma, l)
            dr = _val_neg_deriv(gamma, r)
            if dl is not None and dr is not None:
                return ("imp", dl, dr)
            return None
        case Disj(l, r):
            dl = _val_neg_deriv(gamma, l)
            dr = _val_neg_deriv(gamma, r)
            if dl is not None and dr is not None:
                return ("or", dl, dr)
            return None
        case Conj(l, r):
            dl = _val_neg_deriv(gamma, l)
            if dl is not None:
                return ("and-left", dl)
            dr = _val_neg_deriv(gamma, r)
            if dr is not None:
                return ("and-right", dr)
            return None
        case ForallTm(_, _, body):
            d = _val_neg_deriv(gamma, body)
            return ("all", d) if d is not None else None
        case ExistsTm(_, _, body):
            d = _val_neg_deriv(gamma, body)
            return ("ex", d) if d is not None else None
        case ForallCtx(v, _, body):
            if v == gamma:
                return None
            d = _val_neg_deriv(gamma, body)
            return ("ctx", d) if d is not None else None
        case Top():
            return None
    raise TypeError(f"not a formula: {f!r}")


def val_pos(gamma: str, f: Formula) -> bool:
    """Whether `f` is structurally valid under any ill-formed substitution
    for `gamma`."""
    return _val_pos_deriv(gamma, f) is not None


def val_neg(gamma: str, f: Formula) -> bool:
    """Whether `f` is structurally invalid under any ill-formed substitution
    for `gamma`."""
    return _val_neg_deriv(gamma, f) is not None


# ---------------------------------------------------------------------------
# The transport rule check and its certificate.


@dataclass(frozen=True)
class TransportCertificate:
    gamma: str
    source: ContextSchema
    target: ContextSchema
    formula: Formula
    matches: tuple[BlockMatch, ...]
    valtop: tuple
    source_name: Optional[str] = field(default=None, compare=False)
    target_name: Optional[str] = field(default=None, compare=False)

    def facts(self) -> tuple[tuple[str, str], ...]:
        """All non-subordination facts the recorded drops rely on."""
        out = set()
        for m in self.matches:
            for d in m.drops:
                out |= set(d.formula_facts)
                out |= set(d.schema_facts)
        return tuple(sorted(out))

    def verify(self, sig: Signature, rel: SubordRel) -> bool:
        """Replay every recorded derivation under the checkers."""
        if _val_pos_deriv(self.gamma, self.formula) != self.valtop:
            return False
        if len(self.matches) != len(self.target.blocks):
            return False
        for m in self.matches:
            if not (0 <= m.source_index < len(self.source.blocks)):
                return False
            block = self.target.blocks[m.target_index]
            if make_variant(sig, dict(m.permutation), block) != m.variant:
                return False
            sdecl = self.source.blocks[m.source_index].decl
            vdecl = m.variant.decl
            if not _decl_subsequence_eq(sdecl, [vdecl[i] for i in m.keep_positions]):
                return False
            if not prune_ok(rel, self.source, sdecl, vdecl):
                return False
            if not ce_subsumes(rel, self.gamma, sdecl, vdecl, self.formula):
                return False
            for d in m.drops:
                if vdecl[d.position] != (d.var, d.ty):
                    return False
                if tf_subord(rel, d.ty, self.formula, self.gamma):
                    return False
                for a, b in d.formula_facts + d.schema_facts:
                    if rel.holds(a, b):
                        return False
        return True


@dataclass(frozen=True)
class TransportFailure:
    side: str  # "subsumption" or "validity"
    message: str
    target_index: Optional[int] = None
    binding: Optional[tuple[str, TypeExpr]] = None


def transport_check(
    sig: Signature,
    rel: SubordRel,
    source: ContextSchema,
    target: ContextSchema,
    gamma: str,
    f: Formula,
    search_cap: int = 10000,
    source_name: Optional[str] = None,
    target_name: Optional[str] = None,
) -> Union[TransportCertificate, TransportFailure]:
    """Check the two side conditions of the transportation rule and bundle
    the evidence into a certificate."""
    try:
        check_schema(sig, source)
        check_schema(sig, target)
        check_formula(sig, f, WfEnv(ctx_schemas={gamma: source}))
    except LFError as err:
        raise IllFormedInput(str(err)) from err
    result = schema_subsumes(rel, sig, source, f, gamma, target, search_cap)
    if isinstance(result, SubsumptionFailure):
        return TransportFailure(
            "subsumption",
            f"target block {result.target_index}: {result.message}",
            result.target_index,
            result.undroppable,
        )
    valtop = _val_pos_deriv(gamma, f)
    if valtop is None:
        return TransportFailure(
            "validity",
            "the formula has no structural validity derivation for "
            "ill-formed context substitutions",
        )
    return TransportCertificate(
        gamma, source, target, f, result, valtop, source_name, target_name
    )


def transport_witness(
    sig: Signature, cert: TransportCertificate, g_target: CtxExpr
) -> CtxExpr:
    """Prune an instance of the target schema into an instance of the source
    schema by replaying the certificate's per-block pruning."""
    segmentation = segment_instance(sig, cert.target, g_target)
    if segmentation is None:
        raise SegmentationMismatch(
            "context expression is not an instance of the certificate's target schema"
        )
    kept: list = []
    for block_index, start, end in segmentation:
        m = cert.matches[block_index]
        segment = g_target.bindings[start:end]
        for offset, binding in enumerate(segment):
            if offset in m.keep_positions:
                kept.append(binding)
    return CtxExpr(None, tuple(kept))
