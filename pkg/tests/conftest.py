import pathlib

import pytest

from s2g.graphs import load_ntriples, load_pg, rdf_to_pg

PACKAGE_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "s2g"
CORPUS_DIR = PACKAGE_DIR / "corpus"
FIXTURES_DIR = PACKAGE_DIR / "fixtures"

MODERN_NT = (FIXTURES_DIR / "modern.nt").read_text()
MODERN_PGL = (FIXTURES_DIR / "modern.pgl").read_text()


@pytest.fixture(scope="session")
def modern_rdf():
    return load_ntriples(MODERN_NT)


@pytest.fixture(scope="session")
def modern_pg(modern_rdf):
    return rdf_to_pg(modern_rdf)


@pytest.fixture(scope="session")
def modern_pg_with_weights():
    return load_pg(MODERN_PGL)
