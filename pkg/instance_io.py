#!/usr/bin/env python3
"""
Binary instance files

Layout (all little-endian):
    magic   4 bytes  b"DPDP"
    version u32
    kind    u8       1 = f64 coordinates, 2 = raw bytes, 3 = (u64, u64) match pairs
    count   u64      number of elements (pairs for kind 3)
    payload
"""

import struct
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from dp_types import InvalidInputError, UsageError

MAGIC = b"DPDP"
VERSION = 1
_HEADER = struct.Struct("<4sIBQ")


class PayloadKind(IntEnum):
    COORDINATES = 1
    BYTES = 2
    MATCHES = 3


_DTYPES = {
    PayloadKind.COORDINATES: np.dtype("<f8"),
    PayloadKind.BYTES: np.dtype("u1"),
    PayloadKind.MATCHES: np.dtype("<u8"),
}


@dataclass
class InstanceFile:
    """
    One decoded instance

    payload is a 1-D float64 array (coordinates), a 1-D uint8 array (bytes)
    or an (L, 2) uint64 array of (i, j) pairs (matches).
    """
    kind: PayloadKind
    payload: np.ndarray
    version: int = VERSION

    @property
    def count(self) -> int:
        return len(self.payload)

    def validate(self):
        if self.kind is PayloadKind.COORDINATES and len(self.payload) > 1:
            if not np.all(np.diff(self.payload) > 0):
                raise InvalidInputError("coordinate payload must be strictly ascending")
        if self.kind is PayloadKind.MATCHES and (self.payload.ndim != 2 or self.payload.shape[1] != 2):
            raise InvalidInputError("match payload must hold (i, j) pairs")

    def to_bytes(self) -> bytes:
        self.validate()
        body = np.ascontiguousarray(self.payload, dtype=_DTYPES[self.kind]).tobytes()
        return _HEADER.pack(MAGIC, self.version, int(self.kind), self.count) + body

    @classmethod
    def from_bytes(cls, data: bytes) -> 'InstanceFile':
        if len(data) < _HEADER.size:
            raise InvalidInputError(f"instance file truncated: {len(data)} bytes")
        magic, version, kind_code, count = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise InvalidInputError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != VERSION:
            raise InvalidInputError(f"unsupported instance version {version}")
        try:
            kind = PayloadKind(kind_code)
        except ValueError:
            raise InvalidInputError(f"unknown payload kind {kind_code}") from None
        dtype = _DTYPES[kind]
        items = count * 2 if kind is PayloadKind.MATCHES else count
        expected = _HEADER.size + items * dtype.itemsize
        if len(data) != expected:
            raise InvalidInputError(f"payload size mismatch: {len(data)} bytes, expected {expected}")
        payload = np.frombuffer(data, dtype=dtype, count=items, offset=_HEADER.size).copy()
        if kind is PayloadKind.MATCHES:
            payload = payload.reshape(-1, 2)
        instance = cls(kind=kind, payload=payload, version=version)
        instance.validate()
        return instance

    def write(self, path: Union[str, Path]):
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def read(cls, path: Union[str, Path]) -> 'InstanceFile':
        return cls.from_bytes(Path(path).read_bytes())

    def expect(self, kind: PayloadKind, what: str) -> np.ndarray:
        """Payload if the kind matches, otherwise a usage error naming the consumer"""
        if self.kind is not kind:
            raise UsageError(f"{what} needs a {kind.name.lower()} instance, got {self.kind.name.lower()}")
        return self.payload


def coordinates_instance(coords: Sequence[float]) -> InstanceFile:
    return InstanceFile(PayloadKind.COORDINATES, np.asarray(coords, dtype=np.float64))


def bytes_instance(data: Union[bytes, Sequence[int]]) -> InstanceFile:
    if isinstance(data, (bytes, bytearray)):
        return InstanceFile(PayloadKind.BYTES, np.frombuffer(bytes(data), dtype=np.uint8).copy())
    return InstanceFile(PayloadKind.BYTES, np.asarray(data, dtype=np.uint8))


def matches_instance(pairs: np.ndarray) -> InstanceFile:
    return InstanceFile(PayloadKind.MATCHES, np.asarray(pairs, dtype=np.uint64).reshape(-1, 2))
