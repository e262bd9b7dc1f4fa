"""Labeled matrix datasets and their on-disk formats.

Two formats are supported:

* the package's own line-oriented text format (header ``MDS 1 N m n``,
  then per sample one ``label <int>`` line followed by m rows of n reals;
  reals are written with 17 significant digits so write/read round-trips
  are bit-exact);
* PGM images, both ASCII (P2) and binary (P5), with maxval up to 65535.

Plus the two preprocessing steps used on image data: area-weighted
block-mean resizing and division by the pixel maximum to land in [0, 1].
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InputError, ParseError
from .matcore import as_matrix

__all__ = [
    "LabeledSample",
    "Dataset",
    "read_dataset",
    "write_dataset",
    "read_pgm",
    "write_pgm",
    "normalize_unit",
    "resize_block_mean",
]

REAL_FORMAT = "%.17g"


@dataclass(frozen=True, eq=False)
class LabeledSample:
    """A dense real matrix with an integer class label."""

    matrix: np.ndarray
    label: int

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix))
        object.__setattr__(self, "label", int(self.label))

    @property
    def shape(self):
        return self.matrix.shape


@dataclass(frozen=True, eq=False)
class Dataset:
    """A nonempty sequence of samples sharing one shape."""

    samples: tuple
    provenance: str = ""

    def __post_init__(self):
        samples = tuple(self.samples)
        if not samples:
            raise InputError("dataset must contain at least one sample")
        shape = samples[0].shape
        for s in samples:
            if s.shape != shape:
                raise DimensionError(
                    f"samples must share one shape: {shape} vs {s.shape}"
                )
        object.__setattr__(self, "samples", samples)

    @property
    def shape(self):
        return self.samples[0].shape

    def __len__(self):
        return len(self.samples)

    def labels(self):
        return np.array([s.label for s in self.samples], dtype=int)

    def matrices(self):
        """All sample matrices stacked into an (N, m, n) array."""
        return np.stack([s.matrix for s in self.samples])


def write_dataset(dataset, path):
    """Serialize *dataset* in the ``MDS 1`` text format."""
    m, n = dataset.shape
    lines = [f"MDS 1 {len(dataset)} {m} {n}"]
    for s in dataset.samples:
        lines.append(f"label {s.label}")
        for row in s.matrix:
            lines.append(" ".join(REAL_FORMAT % v for v in row))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_real(token, path, lineno):
    try:
        v = float(token)
    except ValueError:
        raise ParseError(f"bad real literal {token!r}", path, lineno) from None
    if not np.isfinite(v):
        raise ParseError(f"non-finite value {token!r}", path, lineno)
    return v


def read_dataset(path):
    """Parse an ``MDS 1`` file; raises ``ParseError`` with the line number
    of the first malformed or missing line."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()

    def get_line(idx):
        if idx >= len(lines):
            raise ParseError("unexpected end of file", path, idx + 1)
        return lines[idx]

    header = get_line(0).split()
    if len(header) != 5 or header[0] != "MDS" or header[1] != "1":
        raise ParseError("expected header 'MDS 1 N m n'", path, 1)
    try:
        count, m, n = (int(t) for t in header[2:])
    except ValueError:
        raise ParseError("header counts must be integers", path, 1) from None
    if count < 1 or m < 1 or n < 1:
        raise ParseError("header counts must be positive", path, 1)

    samples = []
    lineno = 1
    for _ in range(count):
        tokens = get_line(lineno).split()
        lineno += 1
        if len(tokens) != 2 or tokens[0] != "label":
            raise ParseError("expected 'label <integer>'", path, lineno)
        try:
            label = int(tokens[1])
        except ValueError:
            raise ParseError(f"bad label {tokens[1]!r}", path, lineno) from None
        rows = np.empty((m, n))
        for r in range(m):
            tokens = get_line(lineno).split()
            lineno += 1
            if len(tokens) != n:
                raise ParseError(f"expected {n} values, got {len(tokens)}", path, lineno)
            rows[r] = [_parse_real(t, path, lineno) for t in tokens]
        samples.append(LabeledSample(rows, label))
    for extra in range(lineno, len(lines)):
        if lines[extra].strip():
            raise ParseError("trailing content after last sample", path, extra + 1)
    return Dataset(tuple(samples))


# ---------------------------------------------------------------------------
# PGM images


def _pgm_header_tokens(blob, path):
    """Yield (token, end_offset) for the magic and three header integers,
    honoring '#' comments; returns offset of the byte after maxval."""
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(blob) and blob[pos : pos + 1].isspace():
            pos += 1
        if pos < len(blob) and blob[pos : pos + 1] == b"#":
            while pos < len(blob) and blob[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParseError("truncated header", path)
        tokens.append(blob[start:pos])
    return tokens, pos


def read_pgm(path):
    """Read a P2 (ASCII) or P5 (binary) PGM image into a height-by-width
    matrix of raw pixel values."""
    with open(path, "rb") as fh:
        blob = fh.read()
    tokens, pos = _pgm_header_tokens(blob, path)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"bad magic {magic!r}, expected P2 or P5", path)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ParseError("header fields must be integers", path) from None
    if width < 1 or height < 1:
        raise ParseError("image dimensions must be positive", path)
    if maxval < 1 or maxval > 65535:
        raise ParseError(f"maxval must be in 1..65535, got {maxval}", path)

    if magic == b"P5":
        payload = blob[pos + 1 :]  # single whitespace byte separates header
        dtype = ">u2" if maxval > 255 else "u1"
        need = width * height * (2 if maxval > 255 else 1)
        if len(payload) < need:
            raise ParseError(
                f"short pixel payload: need {need} bytes, have {len(payload)}", path
            )
        pixels = np.frombuffer(payload[:need], dtype=dtype).astype(float)
    else:
        text = blob[pos:].split()
        if len(text) < width * height:
            raise ParseError(
                f"short pixel payload: need {width * height} values, "
                f"have {len(text)}",
                path,
            )
        try:
            pixels = np.array([int(t) for t in text[: width * height]], dtype=float)
        except ValueError:
            raise ParseError("bad pixel literal", path) from None
    return pixels.reshape(height, width)


def write_pgm(matrix, path, maxval=255, raw=True):
    """Write integer pixel values as a PGM image (P5 when *raw*, else P2)."""
    a = as_matrix(matrix)
    if maxval < 1 or maxval > 65535:
        raise InputError(f"maxval must be in 1..65535, got {maxval}")
    pixels = np.rint(a).astype(np.int64)
    if np.any(pixels != a):
        raise InputError("pixel values must be integers")
    if np.any(pixels < 0) or np.any(pixels > maxval):
        raise InputError(f"pixel values must lie in 0..{maxval}")
    height, width = a.shape
    header = f"{'P5' if raw else 'P2'}\n{width} {height}\n{maxval}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        if raw:
            dtype = ">u2" if maxval > 255 else "u1"
            fh.write(pixels.astype(dtype).tobytes())
        else:
            body = "\n".join(" ".join(str(v) for v in row) for row in pixels)
            fh.write((body + "\n").encode("ascii"))


# ---------------------------------------------------------------------------
# Preprocessing


def normalize_unit(matrix, maxval):
    """Divide entrywise by *maxval*, mapping [0, maxval] into [0, 1]."""
    if not (maxval > 0):
        raise InputError(f"maxval must be positive, got {maxval}")
    return matrix / maxval


def _block_weights(old, new):
    """(new, old) row-stochastic-up-to-scale overlap weights: entry (i, r)
    is the length of [i*old/new, (i+1)*old/new) n [r, r+1) times new/old.
    Columns sum to new/old exactly, which preserves the global mean."""
    edges = np.arange(new + 1) * old / new
    w = np.zeros((new, old))
    for i in range(new):
        lo, hi = edges[i], edges[i + 1]
        for r in range(int(np.floor(lo)), min(int(np.ceil(hi)), old)):
            w[i, r] = max(0.0, min(hi, r + 1.0) - max(lo, float(r)))
    return w * (new / old)


def resize_block_mean(matrix, new_rows, new_cols):
    """Resize by area-weighted averaging.

    When the old extents are integer multiples of the new ones each output
    entry is the plain mean of its block; otherwise source pixels
    contribute proportionally to their overlap with each output cell.
    """
    a = as_matrix(matrix)
    if new_rows < 1 or new_cols < 1:
        raise InputError("target dimensions must be positive")
    m, n = a.shape
    if (new_rows, new_cols) == (m, n):
        return a.copy()
    return _block_weights(m, new_rows) @ a @ _block_weights(n, new_cols).T
