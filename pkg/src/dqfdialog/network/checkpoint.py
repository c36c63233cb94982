"""Checkpoint files: key-value text header plus a little-endian float64 payload.

Layout::

    b"DQFDCKPT"            magic
    <u4 version
    <u4 header length in bytes
    header                 utf-8 key-value text
    <f8 * n                W1, b1, w_v, b_v, W_a, b_a in C order
"""

import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from ..errors import FormatError, OntologyError
from ..parser.kvtext import KeyValueParser, as_list, serialize
from .dueling import PARAM_NAMES, QNetParams

logger = logging.getLogger(__name__)

MAGIC = b"DQFDCKPT"
VERSION = 1
_PREFIX = struct.Struct("<8sII")
_PAYLOAD_DTYPE = np.dtype("<f8")


@dataclass
class Checkpoint:
    """Loaded checkpoint contents."""
    params: QNetParams
    frame: int = 0
    metadata: Dict[str, Dict[str, Any]] = field(default_factory=dict)


def save_checkpoint(
    path: Union[str, Path],
    params: QNetParams,
    frame: int = 0,
    metadata: Optional[Dict[str, Dict[str, Any]]] = None,
) -> Path:
    """
    Write a checkpoint.

    Args:
        path: Destination file
        params: Network weights
        frame: Training frame the weights belong to
        metadata: Extra sections (hyperparameters) for the header

    Returns:
        The written path
    """
    path = Path(path)
    sections: Dict[str, Dict[str, Any]] = {
        "checkpoint": {
            "version": VERSION,
            "frame": frame,
            "input_size": params.input_size,
            "hidden_size": params.hidden_size,
            "action_count": params.action_count,
            "dtype": params.W1.dtype.name,
        },
        "shapes": {name: list(value.shape) for name, value in params.items()},
    }
    for name, entries in (metadata or {}).items():
        sections[name] = dict(entries)
    header = serialize(sections).encode("utf-8")
    payload = np.concatenate([np.asarray(value, dtype=_PAYLOAD_DTYPE).ravel() for _, value in params.items()])

    with open(path, "wb") as stream:
        stream.write(_PREFIX.pack(MAGIC, VERSION, len(header)))
        stream.write(header)
        stream.write(payload.tobytes())
    logger.debug(f"Saved checkpoint {path} at frame {frame}")
    return path


def load_checkpoint(
    path: Union[str, Path],
    input_size: Optional[int] = None,
    action_count: Optional[int] = None,
) -> Checkpoint:
    """
    Read a checkpoint, optionally checking it fits a given state/action space.

    Raises:
        FormatError: On bad magic, unsupported version, truncated payload or a
            shape mismatch
    """
    data = Path(path).read_bytes()
    if len(data) < _PREFIX.size:
        raise FormatError(f"{path}: file too short for a checkpoint")
    magic, version, header_len = _PREFIX.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: not a checkpoint file")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported checkpoint version {version}")

    start = _PREFIX.size
    try:
        sections = {s.name: s.as_dict() for s in KeyValueParser().parse(data[start:start + header_len].decode("utf-8"))}
        info = sections["checkpoint"]
        shapes = {name: tuple(int(d) for d in as_list(sections["shapes"][name]) if d != "") for name in PARAM_NAMES}
        frame = int(info["frame"])
        dtype = np.dtype(info.get("dtype", "float64"))
    except (KeyError, ValueError, UnicodeDecodeError, OntologyError) as exc:
        raise FormatError(f"{path}: malformed checkpoint header ({exc})") from None

    payload = np.frombuffer(data, dtype=_PAYLOAD_DTYPE, offset=start + header_len)
    expected = sum(int(np.prod(shape)) for shape in shapes.values())
    if payload.size != expected:
        raise FormatError(f"{path}: payload has {payload.size} values, header describes {expected}")

    arrays = {}
    offset = 0
    for name in PARAM_NAMES:
        size = int(np.prod(shapes[name]))
        arrays[name] = payload[offset:offset + size].reshape(shapes[name]).astype(dtype)
        offset += size
    try:
        params = QNetParams(**arrays)
    except ValueError as exc:
        raise FormatError(f"{path}: inconsistent shapes ({exc})") from None

    if input_size is not None and params.input_size != input_size:
        raise FormatError(f"{path}: network expects {params.input_size} state features, got {input_size}")
    if action_count is not None and params.action_count != action_count:
        raise FormatError(f"{path}: network has {params.action_count} actions, action space has {action_count}")

    metadata = {name: entries for name, entries in sections.items() if name not in ("checkpoint", "shapes")}
    return Checkpoint(params=params, frame=frame, metadata=metadata)
