"""Versioned JSON documents for models and GLS codes.

Every document is a JSON object with ``format`` and ``version`` keys.  Floats are
written with ``repr`` precision so they round-trip bit-exactly; exact rationals
are written as ``"numerator/denominator"`` strings.
"""

from __future__ import annotations

import json
import sys
from contextlib import contextmanager
from fractions import Fraction

SUPPORTED_VERSIONS = {"chaosnet-model": {1}, "chaosnet-uat-code": {1}, "chaosnet-gls-code": {1}}


class DocumentError(ValueError):
    """A persisted document could not be parsed."""


class UnsupportedVersionError(DocumentError):
    pass


def dumps(kind: str, payload: dict) -> str:
    doc = {"format": kind, "version": max(SUPPORTED_VERSIONS[kind]), **payload}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def loads(text: str, kind: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed document at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise DocumentError("document root must be a JSON object")
    if doc.get("format") != kind:
        raise DocumentError(f"expected format {kind!r}, found {doc.get('format')!r}")
    version = doc.get("version")
    if version not in SUPPORTED_VERSIONS[kind]:
        raise UnsupportedVersionError(
            f"unsupported {kind} version {version!r}; supported: {sorted(SUPPORTED_VERSIONS[kind])}"
        )
    return doc


def require(doc: dict, key: str, where: str = "document"):
    try:
        return doc[key]
    except (KeyError, TypeError):
        raise DocumentError(f"{where}: missing field {key!r}") from None


@contextmanager
def _unlimited_int_digits():
    # long bitstreams give numerators past the interpreter's default digit cap
    get = getattr(sys, "get_int_max_str_digits", None)
    if get is None:
        yield
        return
    old = get()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def fraction_to_str(x: Fraction) -> str:
    with _unlimited_int_digits():
        return f"{x.numerator}/{x.denominator}"


def fraction_from_str(s, where: str = "value") -> Fraction:
    if not isinstance(s, str):
        raise DocumentError(f"{where}: expected a 'numerator/denominator' string, got {s!r}")
    try:
        with _unlimited_int_digits():
            return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise DocumentError(f"{where}: not an exact rational: {s!r}") from None
