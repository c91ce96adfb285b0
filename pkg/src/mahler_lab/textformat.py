"""Text format for polynomials used by every CLI entry point.

Two grammars are accepted:

* a comma-separated list of ascending coefficients, each an integer
  (``1,1,0,-1``) or a complex number written ``a+bi`` (``0.5-2i``, ``3i``);
* a symbolic sum of terms in ``z`` such as ``z^10+z^9-z^7+2*z-1`` where a
  coefficient may be an integer, a real, or a parenthesised complex number.

Printing is canonical: the ascending coefficient list without trailing zeros.
"""

from __future__ import annotations

import re

import numpy as np

from .errors import ParseError
from .polynomials import ComplexPolynomial, IntPolynomial

_INT = re.compile(r"[+-]?\d+\Z")
_REAL = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\Z")


def _real(text: str, offset: int) -> float:
    if text in ("", "+"):
        return 1.0
    if text == "-":
        return -1.0
    if not _REAL.match(text):
        raise ParseError(f"bad number {text!r}", offset)
    return float(text)


def _parse_number(token: str, offset: int):
    """Return an int for integer tokens, else a complex."""
    t = token.strip()
    if not t:
        raise ParseError("empty coefficient", offset)
    if _INT.match(t):
        return int(t)
    if t[-1] not in "ij":
        if not _REAL.match(t):
            raise ParseError(f"bad coefficient {t!r}", offset)
        return complex(float(t), 0.0)
    body = t[:-1]
    # split at the last sign that is not an exponent sign and not leading
    split = None
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE":
            split = k
            break
    if split is None:
        return complex(0.0, _real(body, offset))
    if not _REAL.match(body[:split]):
        raise ParseError(f"bad coefficient {t!r}", offset)
    return complex(float(body[:split]), _real(body[split:], offset))


def _build(coeffs):
    if all(isinstance(c, int) for c in coeffs):
        return IntPolynomial(tuple(coeffs))
    return ComplexPolynomial(tuple(complex(c) for c in coeffs))


def _parse_list(text: str):
    coeffs = []
    pos = 0
    for tok in text.split(","):
        lead = len(tok) - len(tok.lstrip())
        coeffs.append(_parse_number(tok, pos + lead))
        pos += len(tok) + 1
    return _build(coeffs)


_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<coef>\(\s*[^()]*\)|\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+)\s*\*?\s*)?
        (?P<var>[zZ]\s*(?:(?:\^|\*\*)\s*(?P<exp>\d+))?)?\s*""",
    re.VERBOSE,
)


def _parse_symbolic(text: str):
    terms = {}
    pos = 0
    first = True
    n = len(text)
    while pos < n:
        m = _TERM.match(text, pos)
        if m is None or m.end() == pos or (m.group("coef") is None and m.group("var") is None):
            raise ParseError("expected a term", pos)
        if not first and m.group("sign") is None:
            raise ParseError("expected '+' or '-' between terms", pos)
        first = False
        sign = -1 if m.group("sign") == "-" else 1
        coef_text = m.group("coef")
        if coef_text is None:
            coef = 1
        elif coef_text.startswith("("):
            coef = _parse_number(coef_text[1:-1], m.start("coef") + 1)
        else:
            coef = _parse_number(coef_text, m.start("coef"))
        if m.group("var") is None:
            power = 0
        else:
            power = int(m.group("exp")) if m.group("exp") else 1
        terms[power] = terms.get(power, 0) + sign * coef
        pos = m.end()
    if not terms:
        raise ParseError("no terms", 0)
    coeffs = [0] * (max(terms) + 1)
    for k, c in terms.items():
        coeffs[k] = c
    return _build(coeffs)


def parse_polynomial(text: str):
    """Parse either grammar; integer-valued input yields an :class:`IntPolynomial`."""
    if text is None or not text.strip():
        raise ParseError("empty polynomial text", 0)
    if re.search(r"[zZ]", text):
        return _parse_symbolic(text)
    return _parse_list(text)


def _format_number(c) -> str:
    if isinstance(c, int):
        return str(c)
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    sign = "+" if c.imag >= 0 else "-"
    return f"{c.real!r}{sign}{abs(c.imag)!r}i"


def format_polynomial(p) -> str:
    """Canonical ascending coefficient list."""
    return ",".join(_format_number(c) for c in p.coeffs)


def matrix_to_json(a) -> list:
    """Row-major nested list of ``[re, im]`` pairs."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        return [[float(x.real), float(x.imag)] for x in a]
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def _pair(x, where):
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) for t in x):
        return complex(x[0], x[1])
    raise ParseError(f"expected a number or [re, im] pair at {where}")


def matrix_from_json(data) -> np.ndarray:
    """Inverse of :func:`matrix_to_json`; plain real numbers are accepted too."""
    if isinstance(data, dict) and "entries" in data:
        data = data["entries"]
    if not isinstance(data, list) or not data:
        raise ParseError("matrix JSON must be a non-empty list of rows")
    rows = []
    for i, row in enumerate(data):
        if not isinstance(row, list):
            raise ParseError(f"row {i} is not a list")
        rows.append([_pair(x, f"row {i}, column {j}") for j, x in enumerate(row)])
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParseError("matrix rows have different lengths")
    return np.array(rows, dtype=complex)


def vector_from_json(data) -> np.ndarray:
    if isinstance(data, dict) and "components" in data:
        data = data["components"]
    if not isinstance(data, list) or not data:
        raise ParseError("vector JSON must be a non-empty list")
    return np.array([_pair(x, f"index {i}") for i, x in enumerate(data)], dtype=complex)
