"""Demonstration files: versioned binary header plus fixed-width records.

All fields are little-endian so files are bit-exact across platforms::

    header  magic "DQFDDEMO", <u4 version, <u4 vector length,
            <u4 action count, <u8 record count
    record  s [u1 * L], a <i8, r <f8, s_next [u1 * L], terminal u1
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Union

import numpy as np

from ..errors import EmptyDemoSet, FormatError
from .buffer import Transition

MAGIC = b"DQFDDEMO"
VERSION = 1
HEADER_DTYPE = np.dtype([
    ("magic", "S8"),
    ("version", "<u4"),
    ("vector_length", "<u4"),
    ("action_count", "<u4"),
    ("records", "<u8"),
])


def record_dtype(vector_length: int) -> np.dtype:
    return np.dtype([
        ("s", "u1", (vector_length,)),
        ("a", "<i8"),
        ("r", "<f8"),
        ("s_next", "u1", (vector_length,)),
        ("terminal", "u1"),
    ])


@dataclass
class DemoSet:
    """Transitions read from a demonstration file."""
    transitions: List[Transition]
    vector_length: int
    action_count: int

    def __len__(self) -> int:
        return len(self.transitions)


def write_demo_file(
    path: Union[str, Path],
    transitions: Iterable[Transition],
    vector_length: int,
    action_count: int,
) -> int:
    """
    Write demonstrations.

    Returns:
        Number of records written

    Raises:
        EmptyDemoSet: If there are no transitions
        ValueError: If a transition does not fit the declared sizes
    """
    transitions = list(transitions)
    if not transitions:
        raise EmptyDemoSet("No demonstration transitions to write")

    records = np.zeros(len(transitions), dtype=record_dtype(vector_length))
    for i, t in enumerate(transitions):
        if len(t.s) != vector_length or len(t.s_next) != vector_length:
            raise ValueError(f"Transition {i} has state length {len(t.s)}, expected {vector_length}")
        if not 0 <= t.a < action_count:
            raise ValueError(f"Transition {i} has action {t.a} outside [0, {action_count})")
        records[i] = (t.s, t.a, t.r, t.s_next, t.terminal)

    header = np.array([(MAGIC, VERSION, vector_length, action_count, len(records))], dtype=HEADER_DTYPE)
    with open(path, "wb") as stream:
        stream.write(header.tobytes())
        stream.write(records.tobytes())
    return len(records)


def read_demo_file(
    path: Union[str, Path],
    vector_length: Optional[int] = None,
    action_count: Optional[int] = None,
) -> DemoSet:
    """
    Read demonstrations; every transition comes back with ``is_demo=True``.

    Raises:
        FormatError: On bad magic, version, truncation or a size mismatch
    """
    data = Path(path).read_bytes()
    if len(data) < HEADER_DTYPE.itemsize:
        raise FormatError(f"{path}: file too short for a demonstration header")
    header = np.frombuffer(data, dtype=HEADER_DTYPE, count=1)[0]
    if bytes(header["magic"]) != MAGIC:
        raise FormatError(f"{path}: not a demonstration file")
    if int(header["version"]) != VERSION:
        raise FormatError(f"{path}: unsupported demonstration file version {int(header['version'])}")

    length = int(header["vector_length"])
    actions = int(header["action_count"])
    if vector_length is not None and length != vector_length:
        raise FormatError(f"{path}: demonstrations have {length} state features, expected {vector_length}")
    if action_count is not None and actions != action_count:
        raise FormatError(f"{path}: demonstrations use {actions} actions, expected {action_count}")

    dtype = record_dtype(length)
    count = int(header["records"])
    if len(data) != HEADER_DTYPE.itemsize + count * dtype.itemsize:
        raise FormatError(f"{path}: expected {count} records, file size disagrees")
    records = np.frombuffer(data, dtype=dtype, count=count, offset=HEADER_DTYPE.itemsize)

    transitions = [
        Transition(
            s=np.array(rec["s"], dtype=np.uint8),
            a=int(rec["a"]),
            r=float(rec["r"]),
            s_next=np.array(rec["s_next"], dtype=np.uint8),
            terminal=bool(rec["terminal"]),
            is_demo=True,
        )
        for rec in records
    ]
    return DemoSet(transitions=transitions, vector_length=length, action_count=actions)
