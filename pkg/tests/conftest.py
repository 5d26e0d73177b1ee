from pathlib import Path

import pytest

from satkg import ModelingMode, build_ucsso, ingest, parse_csv

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_csv_bytes() -> bytes:
    return (FIXTURES / "ucs_sample.csv").read_bytes()


@pytest.fixture(scope="session")
def fixture_records(fixture_csv_bytes):
    return parse_csv(fixture_csv_bytes)


def ingest_fixture(records, mode: ModelingMode):
    ont = build_ucsso(mode)
    return ingest(records, mode, ont)


@pytest.fixture(scope="session")
def direct_store(fixture_records):
    store, _report = ingest_fixture(fixture_records, ModelingMode.DIRECT)
    return store


@pytest.fixture(scope="session")
def reified_store(fixture_records):
    store, _report = ingest_fixture(fixture_records, ModelingMode.REIFIED)
    return store
