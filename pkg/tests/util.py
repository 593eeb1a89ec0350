"""Shorthand constructors for syntax trees in tests."""

from lfport import Atom, AtomicType, CtxExpr, Lam, LFContext, Nominal, O, PiType


def a(head, *args):
    return Atom(head, tuple(args))


def at(head, *args):
    return AtomicType(head, tuple(args))


def pi(var, domain, body):
    return PiType(var, domain, body)


def nom(index, arity=O):
    return Nominal(arity, index)


def ctx(*bindings):
    return LFContext(tuple(bindings))


def ce(*bindings, head=None):
    return CtxExpr(head, tuple(bindings))
