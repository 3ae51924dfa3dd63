"""Frame-stack file formats.

A stack on disk is a JSON manifest next to one file per frame:

    manifest.json   {"format": "pgm" | "csv", "fringe_period_px": ...,
                     "frames": ["frame_0000.pgm", ...], "metadata": {...}}

PGM frames are binary 16-bit P5 (big-endian samples, maxval 65535), one
frame per file with a zero-padded index suffix.  CSV frames hold one row of
comma-separated values per pixel row.  Integer stacks round-trip losslessly
through either format.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InconsistentDimensions, MalformedFile
from .frames import FrameStack, estimate_fringe_period

MANIFEST_NAME = "manifest.json"
_WHITESPACE = b" \t\r\n"


def write_pgm(path, image: np.ndarray) -> None:
    """Write one frame as binary 16-bit P5."""
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ValueError(f"PGM frames must be 2-D, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        if np.any(arr != np.rint(arr)):
            raise ValueError("PGM requires integer pixel values; use CSV for float stacks")
        arr = np.rint(arr)
    if arr.min() < 0 or arr.max() > 65535:
        raise ValueError("PGM pixel values must lie in 0..65535")
    height, width = arr.shape
    header = f"P5\n{width} {height}\n65535\n".encode("ascii")
    Path(path).write_bytes(header + arr.astype(">u2").tobytes())


def read_pgm(path) -> np.ndarray:
    """Read a binary P5 frame (8- or 16-bit samples per the maxval)."""
    path = Path(path)
    data = path.read_bytes()
    pos = 0

    def token() -> bytes:
        nonlocal pos
        while pos < len(data):
            c = data[pos:pos + 1]
            if c in (b" ", b"\t", b"\r", b"\n"):
                pos += 1
            elif c == b"#":
                nl = data.find(b"\n", pos)
                if nl < 0:
                    raise MalformedFile(path, "unterminated comment in header", offset=pos)
                pos = nl + 1
            else:
                break
        start = pos
        while pos < len(data) and data[pos:pos + 1] not in (b" ", b"\t", b"\r", b"\n"):
            pos += 1
        if start == pos:
            raise MalformedFile(path, "unexpected end of header", offset=pos)
        return data[start:pos]

    magic = token()
    if magic != b"P5":
        raise MalformedFile(path, f"not a binary PGM (magic {magic!r})", offset=0)
    try:
        width, height, maxval = int(token()), int(token()), int(token())
    except ValueError:
        raise MalformedFile(path, "non-numeric header field", offset=pos) from None
    if width < 1 or height < 1:
        raise MalformedFile(path, f"bad dimensions {width}x{height}", offset=pos)
    if not 0 < maxval < 65536:
        raise MalformedFile(path, f"maxval {maxval} out of range", offset=pos)
    pos += 1  # exactly one whitespace byte separates the header from the raster
    dtype = ">u2" if maxval > 255 else np.uint8
    count = width * height
    expected = count * (2 if maxval > 255 else 1)
    if len(data) - pos < expected:
        raise MalformedFile(path, f"truncated pixel data "
                            f"(expected {expected} bytes, found {len(data) - pos})",
                            offset=len(data))
    arr = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
    return arr.reshape(height, width).astype(np.uint16)


def write_frame_csv(path, image: np.ndarray) -> None:
    """Write one frame as CSV, one pixel row per line."""
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ValueError(f"CSV frames must be 2-D, got shape {arr.shape}")
    integral = np.issubdtype(arr.dtype, np.integer)
    with open(path, "w") as fh:
        for row in arr:
            if integral:
                fh.write(",".join(str(int(v)) for v in row))
            else:
                fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def read_frame_csv(path) -> np.ndarray:
    path = Path(path)
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(v) for v in line.split(",")]
            except ValueError:
                raise MalformedFile(path, "non-numeric pixel value", line=lineno) from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise MalformedFile(path, f"row has {len(row)} values, expected {width}",
                                    line=lineno)
            if min(row) < 0:
                raise MalformedFile(path, "negative pixel value", line=lineno)
            rows.append(row)
    if not rows:
        raise MalformedFile(path, "no pixel rows", line=1)
    return np.array(rows)


def _frame_name(index: int, n: int, ext: str) -> str:
    pad = max(4, len(str(n - 1)))
    return f"frame_{index:0{pad}d}.{ext}"


def save_frames(stack: FrameStack, directory, fmt: str = "pgm") -> Path:
    """Write a stack as a manifest plus per-frame files; returns the manifest path."""
    if fmt not in ("pgm", "csv"):
        raise ValueError(f"format must be 'pgm' or 'csv', got {fmt!r}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    names = []
    for j in range(stack.n_frames):
        name = _frame_name(j, stack.n_frames, fmt)
        if fmt == "pgm":
            write_pgm(directory / name, stack.frames[j])
        else:
            write_frame_csv(directory / name, stack.frames[j])
        names.append(name)
    manifest = {
        "format": fmt,
        "fringe_period_px": stack.fringe_period_px,
        "frames": names,
        "metadata": stack.metadata,
    }
    manifest_path = directory / MANIFEST_NAME
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest_path


def load_frames(path, fmt: str | None = None,
                fringe_period_px: float | None = None) -> FrameStack:
    """Load a stack from a manifest (or a directory containing one).

    A supplied ``fringe_period_px`` wins over the manifest value; if neither
    is available the period is fitted from the first frame's spectrum.
    """
    path = Path(path)
    manifest_path = path / MANIFEST_NAME if path.is_dir() else path
    try:
        manifest = json.loads(manifest_path.read_text())
    except FileNotFoundError:
        raise
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedFile(manifest_path, f"invalid manifest JSON: {exc}") from None
    file_fmt = manifest.get("format")
    if fmt is not None and file_fmt is not None and fmt != file_fmt:
        raise MalformedFile(manifest_path,
                            f"manifest format {file_fmt!r} does not match requested {fmt!r}")
    file_fmt = fmt or file_fmt
    if file_fmt not in ("pgm", "csv"):
        raise MalformedFile(manifest_path, f"unknown frame format {file_fmt!r}")
    names = manifest.get("frames") or []
    if not names:
        raise MalformedFile(manifest_path, "manifest lists no frames")
    reader = read_pgm if file_fmt == "pgm" else read_frame_csv
    base = manifest_path.parent
    frames = []
    shape = None
    for name in names:
        frame = reader(base / name)
        if shape is None:
            shape = frame.shape
        elif frame.shape != shape:
            raise InconsistentDimensions(
                f"{name}: frame shape {frame.shape} does not match {shape}")
        frames.append(frame)
    stack = np.stack(frames)
    metadata = manifest.get("metadata") or {}
    bit_depth = metadata.get("bit_depth")
    if bit_depth is not None and np.all(stack == np.rint(stack)):
        stack = stack.astype(np.uint16 if bit_depth <= 16 else np.uint32)
    period = fringe_period_px or manifest.get("fringe_period_px")
    if period is None:
        period = estimate_fringe_period(stack[0])
    return FrameStack(frames=stack, fringe_period_px=float(period),
                      metadata=metadata)
