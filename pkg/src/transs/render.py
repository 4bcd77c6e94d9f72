"""Text and JSON rendering of monomials and series.

Text output uses the parser's own syntax so it can be read back in.
"""

from __future__ import annotations

from fractions import Fraction

from .monomial import Monomial


def _var(depth: int) -> str:
    s = "x"
    for _ in range(depth):
        s = f"log({s})"
    return s


def _rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _exponent(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"({_rat(q)})"


def _core_text(xexp: Fraction, exp_terms: tuple, depth: int) -> str:
    parts = []
    if depth:
        # e^{c·log_d x} reads better as (log_{d-1} x)^c
        outer = [c for m, c in exp_terms if m.xexp == 1 and not m.exp_terms]
        if outer:
            exp_terms = tuple(t for t in exp_terms if t[0].xexp != 1 or t[0].exp_terms)
            v = _var(depth - 1)
            parts.append(v if outer[0] == 1 else f"{v}^{_exponent(outer[0])}")
    if xexp:
        v = _var(depth)
        parts.append(v if xexp == 1 else f"{v}^{_exponent(xexp)}")
    if exp_terms:
        inner = _terms_text([(m, c) for m, c in exp_terms], depth)
        parts.append(f"exp({inner})")
    return "*".join(parts) if parts else "1"


def format_monomial(m: Monomial) -> str:
    return _core_text(m.xexp, m.exp_terms, m.depth)


def _terms_text(terms, depth: int) -> str:
    out = []
    for i, (m, c) in enumerate(terms):
        mono = _core_text(m.xexp, m.exp_terms, depth)
        mag = abs(c)
        if mono == "1":
            body = _rat(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_rat(mag)}*{mono}"
        if i == 0:
            out.append(f"-{body}" if c < 0 else body)
        else:
            out.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(out) if out else "0"


def format_bound(bound) -> str:
    from .series import OTerm

    if bound is None:
        return ""
    if isinstance(bound, OTerm):
        return f"O({format_monomial(bound.monomial)})"
    gens = ", ".join(
        format_monomial(bound.ratios.power(e)) for e in sorted(bound.gens)
    )
    return f"O[grid: {gens}]"


def format_series(S) -> str:
    S = S.normalized()
    text = _terms_text(S.terms, S.depth)
    if S.bound is not None:
        b = format_bound(S.bound)
        text = b if text == "0" else f"{text} + {b}"
    return text


# -- JSON -----------------------------------------------------------------

def monomial_json(m: Monomial, depth: int | None = None) -> dict:
    return {
        "depth": m.depth if depth is None else depth,
        "x_exp": _rat(m.xexp),
        "exp_terms": [
            {"coeff": _rat(c), "monomial": monomial_json(n, depth=0)} for n, c in m.exp_terms
        ],
    }


def series_json(S) -> dict:
    from .series import OTerm

    S = S.normalized()
    if S.bound is None:
        bound = {"kind": "exact"}
    elif isinstance(S.bound, OTerm):
        bound = {"kind": "oterm", "monomial": monomial_json(S.bound.monomial)}
    else:
        bound = {
            "kind": "grid",
            "ratios": [monomial_json(r) for r in S.bound.ratios],
            "generators": [list(e) for e in sorted(S.bound.gens)],
        }
    return {
        "terms": [{"coeff": _rat(c), "monomial": monomial_json(m)} for m, c in S.terms],
        "bound": bound,
    }


def monomial_from_json(obj: dict) -> Monomial:
    terms = tuple(
        (monomial_from_json(t["monomial"]), Fraction(t["coeff"])) for t in obj["exp_terms"]
    )
    return Monomial.make(Fraction(obj["x_exp"]), terms, int(obj["depth"]))


def series_from_json(obj: dict):
    from .series import OTerm, Series

    b = obj["bound"]
    bound = None
    if b["kind"] == "oterm":
        bound = OTerm(monomial_from_json(b["monomial"]))
    elif b["kind"] != "exact":
        raise ValueError(f"unsupported bound kind {b['kind']!r}")
    items = [(monomial_from_json(t["monomial"]), Fraction(t["coeff"])) for t in obj["terms"]]
    return Series.from_terms(items, bound)
