from pathlib import Path

import pytest

import lfport as L
from lfport.parse import parse_formula, parse_schemas, parse_signature

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def read(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def sig_size():
    sig = parse_signature(read("sig_size.lf"))
    L.check_signature(sig)
    return sig


@pytest.fixture(scope="session")
def rel_size(sig_size):
    return L.compute_subordination(sig_size)


@pytest.fixture(scope="session")
def schemas_size(sig_size):
    schemas = parse_schemas(read("schemas_size.sch"))
    for cs in schemas.values():
        L.check_schema(sig_size, cs)
    return schemas


@pytest.fixture(scope="session")
def sig_stlc():
    sig = parse_signature(read("sig_stlc.lf"))
    L.check_signature(sig)
    return sig


@pytest.fixture(scope="session")
def rel_stlc(sig_stlc):
    return L.compute_subordination(sig_stlc)


@pytest.fixture(scope="session")
def schemas_stlc(sig_stlc):
    schemas = parse_schemas(read("schemas_stlc.sch"))
    for cs in schemas.values():
        L.check_schema(sig_stlc, cs)
    return schemas


@pytest.fixture(scope="session")
def plus_body(schemas_size):
    return parse_formula(read("plus.fml"), schemas_size)


@pytest.fixture(scope="session")
def plus_closed(schemas_size):
    return parse_formula(read("plus_ctx.fml"), schemas_size)


@pytest.fixture(scope="session")
def tm_size_body(schemas_size):
    return parse_formula(read("tm_size.fml"), schemas_size)


@pytest.fixture(scope="session")
def of_exists_body(schemas_stlc):
    return parse_formula(read("of_exists.fml"), schemas_stlc)
