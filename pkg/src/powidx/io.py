"""Game and density file formats (JSON).

Rationals are written as integers or strings such as ``"3"``, ``"1/6"`` or
``"0.6"``. Every game file holds one game; the ``class`` key selects binary,
``jk`` or continuous games.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .binary import BinaryGame, Join, Meet
from .continuous import ContinuousGame, JoinC, MeetC, QuotaFunction, Threshold
from .density import Density, DensityVector
from .errors import InputError, ParseError
from .jk import JKGame


def _rational(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise ParseError(f"{where}: expected a rational number, got {v!r}")
    try:
        return Fraction(str(v).strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: cannot read {v!r} as a rational number") from None


def _rationals(vs, where):
    if not isinstance(vs, list) or not vs:
        raise ParseError(f"{where}: expected a nonempty list")
    return [_rational(v, f"{where}[{i}]") for i, v in enumerate(vs)]


def _get(obj, key, where):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in obj:
        raise ParseError(f"{where}: missing key {key!r}")
    return obj[key]


def _int(v, where):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{where}: expected an integer, got {v!r}")
    return v


def load_json(path):
    """Read JSON, turning syntax errors into :class:`ParseError` with line/column."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno, path=str(path)) from None


def game_from_dict(obj, where="$"):
    cls = _get(obj, "class", where)
    try:
        if cls == "binary":
            return _binary(obj, where)
        if cls == "jk":
            return _jk(obj, where)
        if cls == "continuous":
            return _continuous(obj, where)
    except ParseError:
        raise
    except InputError as exc:
        raise ParseError(f"{where}: {exc}") from None
    raise ParseError(f"{where}.class: unknown game class {cls!r} (binary, jk, continuous)")


def _binary(obj, where):
    kind = _get(obj, "kind", where)
    if kind == "weighted":
        return BinaryGame.weighted(
            _rational(_get(obj, "quota", where), f"{where}.quota"),
            _rationals(_get(obj, "weights", where), f"{where}.weights"),
        )
    if kind == "table":
        n = _int(_get(obj, "n", where), f"{where}.n")
        winning = _get(obj, "winning", where)
        if not isinstance(winning, list):
            raise ParseError(f"{where}.winning: expected a list of coalitions")
        return BinaryGame.from_winning(n, winning)
    if kind in ("meet", "join"):
        parts = [_binary_part(p, f"{where}.parts[{i}]") for i, p in enumerate(_get(obj, "parts", where))]
        if len({p.n for p in parts}) != 1:
            raise ParseError(f"{where}.parts: games have different voter counts")
        body = Meet(tuple(parts)) if kind == "meet" else Join(tuple(parts))
        return BinaryGame(parts[0].n, body)
    raise ParseError(f"{where}.kind: unknown binary kind {kind!r}")


def _binary_part(obj, where):
    if isinstance(obj, dict) and "class" not in obj:
        obj = dict(obj, **{"class": "binary"})
    return _binary(obj, where)


def _jk(obj, where):
    n = _int(_get(obj, "n", where), f"{where}.n")
    j = _int(_get(obj, "j", where), f"{where}.j")
    k = _int(_get(obj, "k", where), f"{where}.k")
    rule = _get(obj, "rule", where)
    if _get(rule, "kind", f"{where}.rule") != "table":
        raise ParseError(f"{where}.rule.kind: only 'table' rules are supported")
    entries = []
    for i, e in enumerate(_get(rule, "entries", f"{where}.rule")):
        at = f"{where}.rule.entries[{i}]"
        prof = _get(e, "profile", at)
        if not isinstance(prof, list):
            raise ParseError(f"{at}.profile: expected a list of levels")
        entries.append((tuple(_int(p, f"{at}.profile") for p in prof), _int(_get(e, "output", at), f"{at}.output")))
    return JKGame.from_entries(n, j, k, entries)


def _quota_fn(obj, where):
    if "breakpoints" in obj:
        bps = obj["breakpoints"]
        if not isinstance(bps, list):
            raise ParseError(f"{where}.breakpoints: expected a list of [x, y] pairs")
        pairs = []
        for i, p in enumerate(bps):
            if not isinstance(p, list) or len(p) != 2:
                raise ParseError(f"{where}.breakpoints[{i}]: expected [x, y]")
            pairs.append(tuple(_rational(v, f"{where}.breakpoints[{i}]") for v in p))
        return QuotaFunction(breakpoints=tuple(pairs))
    if "monomials" in obj:
        coeffs = {}
        for i, t in enumerate(obj["monomials"]):
            at = f"{where}.monomials[{i}]"
            if isinstance(t, dict):
                e = t.get("exponent", (t.get("exponents") or [None])[0])
                e = _int(e, f"{at}.exponent")
                coeffs[e] = coeffs.get(e, Fraction(0)) + _rational(_get(t, "coef", at), f"{at}.coef")
            else:
                coeffs[i] = _rational(t, at)
        top = max(coeffs)
        return QuotaFunction(coeffs=tuple(coeffs.get(k, Fraction(0)) for k in range(top + 1)))
    raise ParseError(f"{where}: quota function needs 'breakpoints' or 'monomials'")


def _continuous(obj, where):
    kind = _get(obj, "kind", where)
    if kind == "monomial_sum":
        terms = []
        for i, t in enumerate(_get(obj, "terms", where)):
            at = f"{where}.terms[{i}]"
            exps = _get(t, "exponents", at)
            if not isinstance(exps, list):
                raise ParseError(f"{at}.exponents: expected a list")
            terms.append((_rational(_get(t, "coef", at), f"{at}.coef"), tuple(_int(e, f"{at}.exponents") for e in exps)))
        return ContinuousGame.monomials(terms)
    if kind == "linear_weighted":
        return ContinuousGame.linear(_rationals(_get(obj, "weights", where), f"{where}.weights"))
    if kind == "threshold":
        return ContinuousGame.threshold(
            _rational(_get(obj, "quota", where), f"{where}.quota"),
            _rationals(_get(obj, "weights", where), f"{where}.weights"),
        )
    if kind == "quota_weighted":
        return ContinuousGame.quota_weighted(
            _rationals(_get(obj, "weights", where), f"{where}.weights"),
            _quota_fn(_get(obj, "quota_fn", where), f"{where}.quota_fn"),
        )
    if kind == "weighted_median":
        return ContinuousGame.weighted_median(_rationals(_get(obj, "weights", where), f"{where}.weights"))
    if kind == "median":
        return ContinuousGame.median(_int(_get(obj, "n", where), f"{where}.n"))
    if kind in ("meet", "join"):
        parts = []
        for i, p in enumerate(_get(obj, "parts", where)):
            at = f"{where}.parts[{i}]"
            if isinstance(p, dict) and "class" not in p:
                p = dict(p, **{"class": "continuous"})
            parts.append(_continuous(p, at))
        if len({p.n for p in parts}) != 1:
            raise ParseError(f"{where}.parts: games have different voter counts")
        return ContinuousGame(parts[0].n, (MeetC if kind == "meet" else JoinC)(tuple(parts)))
    if kind == "threshold_intersection":
        parts = []
        for i, p in enumerate(_get(obj, "parts", where)):
            at = f"{where}.parts[{i}]"
            parts.append(
                Threshold(
                    _rational(_get(p, "quota", at), f"{at}.quota"),
                    tuple(_rationals(_get(p, "weights", at), f"{at}.weights")),
                )
            )
        return ContinuousGame.intersection(parts)
    if kind == "binary_embedding":
        inner = _get(obj, "game", where)
        if isinstance(inner, dict) and "class" not in inner:
            inner = dict(inner, **{"class": "binary"})
        cut = _rational(obj.get("cut", "1/2"), f"{where}.cut")
        return ContinuousGame.embedding(_binary(inner, f"{where}.game"), cut)
    raise ParseError(f"{where}.kind: unknown continuous kind {kind!r}")


def load_game(path):
    try:
        return game_from_dict(load_json(path))
    except ParseError as exc:
        if exc.path is None:
            exc.path = str(path)
            exc.args = (f"{path}: {exc.args[0]}",)
        raise


def density_from_dict(obj, where="$") -> DensityVector:
    items = _get(obj, "density", where)
    if not isinstance(items, list) or not items:
        raise ParseError(f"{where}.density: expected a nonempty list")
    out = []
    for i, d in enumerate(items):
        at = f"{where}.density[{i}]"
        sup = _get(d, "support", at)
        if not isinstance(sup, list) or len(sup) != 2:
            raise ParseError(f"{at}.support: expected [lo, hi]")
        pieces = []
        for k, p in enumerate(_get(d, "pieces", at)):
            pat = f"{at}.pieces[{k}]"
            iv = _get(p, "interval", pat)
            if not isinstance(iv, list) or len(iv) != 2:
                raise ParseError(f"{pat}.interval: expected [a, b]")
            a, b = (_rational(v, f"{pat}.interval") for v in iv)
            pieces.append((a, b, tuple(_rationals(_get(p, "coeffs", pat), f"{pat}.coeffs"))))
        try:
            out.append(Density(tuple(_rational(v, f"{at}.support") for v in sup), tuple(pieces)))
        except ParseError:
            raise
        except InputError as exc:
            raise ParseError(f"{at}: {exc}") from None
    try:
        return DensityVector(tuple(out))
    except InputError as exc:
        raise ParseError(f"{where}: {exc}") from None


def load_density(path) -> DensityVector:
    try:
        return density_from_dict(load_json(path))
    except ParseError as exc:
        if exc.path is None:
            exc.path = str(path)
            exc.args = (f"{path}: {exc.args[0]}",)
        raise
