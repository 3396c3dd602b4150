"""Shared test fixtures: generated collections, reused across modules."""

from __future__ import annotations

import pytest

from docqakit import FixtureSpec, generate_fixture, save_fixture


@pytest.fixture(scope="session")
def fixture30():
    return generate_fixture(FixtureSpec(n_docs=30, seed=3))


@pytest.fixture(scope="session")
def fixture100():
    return generate_fixture(FixtureSpec())


@pytest.fixture(scope="session")
def fixture500():
    return generate_fixture(FixtureSpec(n_docs=500, seed=7))


@pytest.fixture(scope="session")
def fixture100_dir(fixture100, tmp_path_factory):
    directory = tmp_path_factory.mktemp("fixture100")
    save_fixture(fixture100, directory)
    return directory


@pytest.fixture(scope="session")
def fixture30_dir(fixture30, tmp_path_factory):
    directory = tmp_path_factory.mktemp("fixture30")
    save_fixture(fixture30, directory)
    return directory
