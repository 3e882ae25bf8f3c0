"""
Shared pytest fixtures.
"""

import json
from pathlib import Path

import pytest

import builders
from combifold import io
from combifold.simplicial import simplex_boundary

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def circle():
    return simplex_boundary(2)


@pytest.fixture
def tetra_boundary():
    return simplex_boundary(3)


@pytest.fixture
def torus():
    return builders.torus7()


@pytest.fixture
def theta():
    return builders.theta()


@pytest.fixture
def square():
    return builders.square_poset()


@pytest.fixture
def broken():
    return builders.broken_poset()


@pytest.fixture
def write_json(tmp_path):
    """Write a document to a temporary file and return its path."""

    def write(name, document):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return write


@pytest.fixture
def complex_document():
    def build(complex_):
        return io.complex_to_json(complex_)

    return build
