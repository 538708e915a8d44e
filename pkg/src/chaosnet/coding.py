"""Lossless GLS coding with exact rational arithmetic, and the bitplane
construction that approximates a bounded sampled function to within eps.

Encoding a bitstream refines [0, 1) with the skew-binary partition at ``p``: a 0
keeps the lower fraction ``p`` of the current interval, a 1 the upper ``1 - p``.
Any point of the final interval is an initial value whose skew-binary
itinerary reproduces the bits, so decoding is plain forward iteration of the
map.  Interval bounds are kept as integers over a common denominator; Fractions
are only formed at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import docformat


@dataclass(frozen=True)
class CodingInterval:
    low: Fraction
    high: Fraction

    @property
    def width(self) -> Fraction:
        return self.high - self.low

    @property
    def midpoint(self) -> Fraction:
        return (self.low + self.high) / 2

    def __contains__(self, x) -> bool:
        return self.low <= x < self.high


def _as_probability(p) -> Fraction:
    p = Fraction(p)
    if not 0 < p < 1:
        raise ValueError(f"skew p must lie strictly between 0 and 1, got {p}")
    return p


def _bits(bits) -> list[int]:
    if isinstance(bits, str):
        out = [int(c) for c in bits if not c.isspace()]
    else:
        out = [int(b) for b in bits]
    if any(b not in (0, 1) for b in out):
        raise ValueError("bitstream may only contain 0 and 1")
    return out


def encode(bits, p) -> CodingInterval:
    """Interval of initial values whose skew-binary itinerary starts with ``bits``."""
    p = _as_probability(p)
    seq = _bits(bits)
    if not seq:
        raise ValueError("cannot encode an empty bitstream")
    a, d = p.numerator, p.denominator
    low, width, den = 0, 1, 1  # low/den, width/den
    for bit in seq:
        if bit:
            low = low * d + width * a
            width *= d - a
        else:
            low *= d
            width *= a
        den *= d
    return CodingInterval(Fraction(low, den), Fraction(low + width, den))


def decode(x, p, n: int) -> str:
    """First ``n`` symbols (as '0'/'1') of the exact skew-binary itinerary of ``x``."""
    p = _as_probability(p)
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ValueError(f"x must lie in [0, 1), got {x}")
    a, d = p.numerator, p.denominator
    num, den = x.numerator, x.denominator
    out = []
    for _ in range(n):
        # x < p  <=>  num*d < a*den
        if num * d < a * den:
            out.append("0")
            num, den = num * d, den * a  # x / p
        else:
            out.append("1")
            num, den = num * d - a * den, den * (d - a)  # (x - p) / (1 - p)
    return "".join(out)


def _log2_fraction(x: Fraction) -> float:
    return math.log2(x.numerator) - math.log2(x.denominator)


def code_length_bits(interval: CodingInterval) -> float:
    """Ideal code length ``-log2(width)`` of an interval."""
    return -_log2_fraction(interval.width)


def binary_entropy(p) -> float:
    p = float(p)
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


# -- function approximation via bitplanes -----------------------------------


@dataclass(frozen=True)
class Bitplane:
    """One GLS-encoded bitplane.

    ``p`` is the empirical probability of 0 and ``x`` the interval midpoint.  A
    plane made of a single repeated bit cannot use a skew in (0, 1), so it stores
    that bit in ``constant`` with ``p`` set to None and ``x`` to 1/2.
    """

    x: Fraction
    p: Fraction | None
    constant: int | None = None


@dataclass(frozen=True)
class UatCode:
    scale: int
    offset: Fraction
    length: int
    bitplanes: tuple  # MSB first

    @property
    def bitplane_count(self) -> int:
        return len(self.bitplanes)


def quantization_scale(epsilon) -> int:
    """Integer scale whose rounding error 1/(2*scale) is strictly below ``epsilon``.

    The plain ``ceil(1/(2*eps))`` can put the bound exactly on ``eps``, where the
    final float conversion may overshoot by an ulp, so one level of headroom is
    added.
    """
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return math.ceil(1 / (2 * eps)) + 1


def encode_bitplane(bits: list[int]) -> Bitplane:
    zeros = bits.count(0)
    if zeros in (0, len(bits)):
        return Bitplane(Fraction(1, 2), None, bits[0])
    p = Fraction(zeros, len(bits))
    return Bitplane(encode(bits, p).midpoint, p)


def decode_bitplane(plane: Bitplane, length: int) -> list[int]:
    if plane.constant is not None:
        return [plane.constant] * length
    return [int(c) for c in decode(plane.x, plane.p, length)]


def uat_encode(samples, epsilon) -> UatCode:
    """Quantise, split into bitplanes and GLS-encode each plane."""
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("cannot encode an empty sample vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("samples must be finite")
    values = [Fraction(float(v)) for v in arr]
    scale = quantization_scale(epsilon)
    offset = min(values)
    ints = [round((v - offset) * scale) for v in values]
    planes_needed = max(1, max(ints).bit_length())
    planes = []
    for k in reversed(range(planes_needed)):
        planes.append(encode_bitplane([(a >> k) & 1 for a in ints]))
    return UatCode(scale, offset, len(values), tuple(planes))


def uat_integers(code: UatCode) -> list[int]:
    ints = [0] * code.length
    for plane in code.bitplanes:
        bits = decode_bitplane(plane, code.length)
        if len(bits) != code.length:
            raise ValueError("bitplane length does not match the code length")
        ints = [2 * a + b for a, b in zip(ints, bits)]
    return ints


def uat_decode(code: UatCode) -> np.ndarray:
    """Reconstructed samples; each is within eps of the encoded original."""
    if code.length < 1 or not code.bitplanes:
        raise ValueError("code has no samples or no bitplanes")
    return np.array([float(code.offset + Fraction(a, code.scale)) for a in uat_integers(code)])


# -- persistence ------------------------------------------------------------

UAT_FORMAT = "chaosnet-uat-code"
GLS_FORMAT = "chaosnet-gls-code"
_f2s = docformat.fraction_to_str


def dumps_uat(code: UatCode) -> str:
    planes = []
    for pl in code.bitplanes:
        if pl.constant is not None:
            planes.append({"constant": pl.constant})
        else:
            planes.append({"p": _f2s(pl.p), "x": _f2s(pl.x)})
    payload = {
        "scale": code.scale,
        "offset": _f2s(code.offset),
        "length": code.length,
        "bitplanes": planes,
    }
    return docformat.dumps(UAT_FORMAT, payload)


def loads_uat(text: str) -> UatCode:
    doc = docformat.loads(text, UAT_FORMAT)
    req = docformat.require
    planes = []
    for i, pl in enumerate(req(doc, "bitplanes")):
        where = f"bitplane {i}"
        if "constant" in pl:
            if pl["constant"] not in (0, 1):
                raise docformat.DocumentError(f"{where}: constant must be 0 or 1")
            planes.append(Bitplane(Fraction(1, 2), None, int(pl["constant"])))
        else:
            p = docformat.fraction_from_str(req(pl, "p", where), where)
            x = docformat.fraction_from_str(req(pl, "x", where), where)
            planes.append(Bitplane(x, p))
    length = req(doc, "length")
    scale = req(doc, "scale")
    if not isinstance(length, int) or length < 1 or not isinstance(scale, int) or scale < 1:
        raise docformat.DocumentError("length and scale must be positive integers")
    return UatCode(scale, docformat.fraction_from_str(req(doc, "offset"), "offset"), length, tuple(planes))


def bytes_to_bits(data: bytes) -> list[int]:
    return [(byte >> k) & 1 for byte in data for k in range(7, -1, -1)]


def bits_to_bytes(bits) -> bytes:
    bits = list(bits)
    if len(bits) % 8:
        raise ValueError("bit count is not a multiple of 8")
    out = bytearray()
    for i in range(0, len(bits), 8):
        byte = 0
        for b in bits[i : i + 8]:
            byte = (byte << 1) | b
        out.append(byte)
    return bytes(out)


def encode_bytes(data: bytes, p=None) -> str:
    """GLS-encode a byte string into a document holding ``p``, the bit count and
    the interval midpoint.  ``p`` defaults to the empirical zero frequency."""
    bits = bytes_to_bits(data)
    payload = {"n_bits": len(bits)}
    if not bits:
        payload.update({"p": None, "x": None})
        return docformat.dumps(GLS_FORMAT, payload)
    if p is None:
        zeros = bits.count(0)
        p = Fraction(zeros, len(bits)) if 0 < zeros < len(bits) else Fraction(1, 2)
    p = _as_probability(p)
    interval = encode(bits, p)
    payload.update({"p": _f2s(p), "x": _f2s(interval.midpoint)})
    return docformat.dumps(GLS_FORMAT, payload)


def decode_bytes(text: str) -> bytes:
    doc = docformat.loads(text, GLS_FORMAT)
    n = docformat.require(doc, "n_bits")
    if not isinstance(n, int) or n < 0:
        raise docformat.DocumentError("n_bits must be a non-negative integer")
    if n == 0:
        return b""
    p = docformat.fraction_from_str(docformat.require(doc, "p"), "p")
    x = docformat.fraction_from_str(docformat.require(doc, "x"), "x")
    return bits_to_bytes(int(c) for c in decode(x, p, n))
