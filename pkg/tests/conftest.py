from __future__ import annotations

import pytest

from certchain.keys import SigningKey
from certchain.records import CertificateRecord
from certchain.registry import Registry

BOOTSTRAP_SEED = bytes(range(32))
REGISTRAR_SEED = bytes(range(32, 64))


@pytest.fixture
def bootstrap_key() -> SigningKey:
    return SigningKey.from_seed("bootstrap", BOOTSTRAP_SEED)


@pytest.fixture
def registrar_key() -> SigningKey:
    return SigningKey.from_seed("reg-01", REGISTRAR_SEED)


@pytest.fixture
def registry(bootstrap_key) -> Registry:
    return Registry.in_memory(bootstrap_key)


def make_record(serial: str = "SER-0001", **overrides) -> CertificateRecord:
    fields = dict(
        serial=serial,
        student_name="Amina Rahman",
        student_id="ST-2209",
        degree_title="BSc in Computer Science",
        major="Software Engineering",
        grade="3.85/4.00",
        graduation_date="2023-06-15",
        institution_id="BRACU",
        issued_at=1_700_000_000,
        extras={},
    )
    fields.update(overrides)
    return CertificateRecord(**fields)


@pytest.fixture
def record() -> CertificateRecord:
    return make_record()
