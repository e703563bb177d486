#!/usr/bin/env python3
"""
Tests for the binary instance file format
"""

import struct
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

from dp_types import InvalidInputError, UsageError
from instance_io import (MAGIC, InstanceFile, PayloadKind, bytes_instance, coordinates_instance,
                         matches_instance)


def test_header_layout():
    data = coordinates_instance([1.0, 2.5, 4.0]).to_bytes()
    assert data[:4] == b"DPDP"
    version, kind, count = struct.unpack_from("<IBQ", data, 4)
    assert (version, kind, count) == (1, 1, 3)
    assert len(data) == 4 + 4 + 1 + 8 + 3 * 8
    assert struct.unpack_from("<3d", data, 17) == (1.0, 2.5, 4.0)


def test_round_trips_are_byte_identical():
    instances = [
        coordinates_instance(np.cumsum(np.arange(1, 20)) * 0.5),
        bytes_instance(b"hello world"),
        bytes_instance([0, 255, 7]),
        matches_instance(np.array([[1, 3], [2, 1], [4, 1]])),
        coordinates_instance([]),
    ]
    for instance in instances:
        data = instance.to_bytes()
        decoded = InstanceFile.from_bytes(data)
        assert decoded.kind is instance.kind
        assert decoded.to_bytes() == data
        assert np.array_equal(decoded.payload, instance.payload)


def test_match_payload_shape():
    decoded = InstanceFile.from_bytes(matches_instance([[1, 2], [3, 4]]).to_bytes())
    assert decoded.payload.shape == (2, 2)
    assert decoded.count == 2


def test_write_and_read_files():
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "villages.dpdp"
        coordinates_instance([1.0, 2.0, 8.0]).write(path)
        assert InstanceFile.read(path).payload.tolist() == [1.0, 2.0, 8.0]


def test_unsorted_coordinates_rejected():
    with pytest.raises(InvalidInputError):
        coordinates_instance([1.0, 3.0, 2.0]).to_bytes()


def test_corrupt_files_rejected():
    good = bytes_instance(b"abc").to_bytes()
    with pytest.raises(InvalidInputError):
        InstanceFile.from_bytes(good[:10])
    with pytest.raises(InvalidInputError):
        InstanceFile.from_bytes(b"XXXX" + good[4:])
    with pytest.raises(InvalidInputError):
        InstanceFile.from_bytes(good + b"d")
    with pytest.raises(InvalidInputError):
        InstanceFile.from_bytes(MAGIC + struct.pack("<IBQ", 2, 2, 0))
    with pytest.raises(InvalidInputError):
        InstanceFile.from_bytes(MAGIC + struct.pack("<IBQ", 1, 9, 0))


def test_expect_checks_kind():
    instance = bytes_instance(b"abc")
    assert instance.expect(PayloadKind.BYTES, "lcs").tolist() == [97, 98, 99]
    with pytest.raises(UsageError):
        instance.expect(PayloadKind.COORDINATES, "glws-par")


if __name__ == "__main__":
    results = []
    for name, test in [(k, v) for k, v in list(globals().items()) if k.startswith('test_') and callable(v)]:
        try:
            test()
            print(f"✓ {name}")
            results.append(True)
        except Exception as e:
            print(f"✗ {name}: {e!r}")
            results.append(False)
    print("-" * 60)
    print("✓ All tests passed!" if all(results) else "✗ Some tests failed.")
    sys.exit(0 if all(results) else 1)
