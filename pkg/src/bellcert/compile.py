"""Compile a stabilizer code and certificate into a Bell polynomial.

The substitution rules map site-local X/Z symbols to the two measurement
settings: direct sites use X -> A0, Z -> A1; tilted-pair sites use
X -> (A0+A1)/(2 cos mu) and Z -> (A0-A1)/(2 sin mu).  The compiled
inequality comes with an operator upper bound certified by expanding
alpha0 (P - 1)^2 + sum_i alpha_i (S_i - 1)^2 >= 0 as an exact
noncommutative polynomial identity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .pauli import PauliWord, StabilizerCode
from .poly import (A0, A1, DIRECT, BellPolynomial, MeasurementAssignment,
                   Monomial)

SOS_TOL = 1e-10

XZWord = tuple[tuple[int, str], ...]  # ordered (site, 'X'|'Z') letters


class CertificateError(ValueError):
    """Raised for invalid certificate parameters."""


def xz_word(letters: Iterable[tuple[int, str]]) -> XZWord:
    out = []
    for site, sym in letters:
        if sym not in ("X", "Z"):
            raise ValueError(f"symbol must be 'X' or 'Z', got {sym!r}")
        out.append((int(site), sym))
    return tuple(out)


def xz_word_from_pauli(word: PauliWord) -> XZWord:
    """Expand a phase-free qubit Pauli word into (site, symbol) letters."""
    if word.q != 2:
        raise ValueError("only q=2 words translate to measurement settings")
    if word.phase != 0:
        raise ValueError("word must be phase-free")
    letters = []
    for k in range(word.n):
        if word.x_exp[k]:
            letters.append((k + 1, "X"))
        if word.z_exp[k]:
            letters.append((k + 1, "Z"))
    return tuple(letters)


def render_xz_word(word: XZWord) -> str:
    return "".join(f"{sym}{site}" for site, sym in word) or "I"


@dataclass(frozen=True)
class SOSCertificate:
    """Weights and operator list for a sum-of-squares Bell certificate."""

    n: int
    theta: float
    alpha0: float
    alphas: tuple[float, ...]
    operators: tuple[XZWord, ...]
    pair_sites: frozenset[int]
    mu: float = math.pi / 4
    labels: tuple[int, ...] = ()
    code_name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "operators", tuple(xz_word(w) for w in self.operators))
        object.__setattr__(self, "pair_sites", frozenset(self.pair_sites))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if not self.operators:
            raise CertificateError("operator list must be nonempty")
        if len(self.alphas) != len(self.operators):
            raise CertificateError("need one alpha per operator")
        if not 0.0 <= self.theta <= math.pi / 2:
            raise CertificateError(f"theta={self.theta} outside [0, pi/2]")
        if self.alpha0 < 0:
            raise CertificateError("alpha0 must be >= 0")
        for i, a in enumerate(self.alphas):
            if a <= 0:
                raise CertificateError(f"alpha_{i + 1} = {a} must be positive")
        if not 0.0 < self.mu < math.pi / 2:
            raise CertificateError(f"mu={self.mu} outside (0, pi/2)")
        if not self.labels:
            object.__setattr__(self, "labels",
                               tuple(range(1, len(self.operators) + 1)))
        for word in self.operators:
            for site, _ in word:
                if not 1 <= site <= self.n:
                    raise CertificateError(f"operator site {site} out of range")

    def assignment(self) -> MeasurementAssignment:
        return MeasurementAssignment.build(self.n, self.pair_sites, self.mu)

    def alpha_sum(self) -> float:
        return sum(self.alphas)


# Extra operators required by the deduction proofs, keyed by preset name.
PRESET_EXTRAS: dict[str, tuple[tuple[int, XZWord], ...]] = {
    "five_qubit": (),
    "steane": (
        (4, xz_word([(1, "X"), (2, "X"), (5, "X"), (6, "X")])),
        (8, xz_word([(1, "Z"), (2, "Z"), (5, "Z"), (6, "Z")])),
    ),
    "shor": (
        (9, xz_word([(4, "X"), (5, "X"), (6, "X"),
                     (7, "X"), (8, "X"), (9, "X")])),
    ),
}

PRESET_GENERATOR_LABELS: dict[str, tuple[int, ...]] = {
    "steane": (1, 2, 3, 5, 6, 7),
}

PRESET_ALPHAS: dict[str, tuple[float, ...]] = {
    "five_qubit": (math.sqrt(2), 1.0, math.sqrt(2), 2 * math.sqrt(2)),
}


def default_operators(code: StabilizerCode,
                      extras: bool = True) -> tuple[tuple[XZWord, ...], tuple[int, ...]]:
    """Operator list (and display labels) for a code, extras interleaved by label."""
    gen_labels = PRESET_GENERATOR_LABELS.get(code.name,
                                             tuple(range(1, len(code.generators) + 1)))
    entries = [(lab, xz_word_from_pauli(g))
               for lab, g in zip(gen_labels, code.generators)]
    if extras:
        entries.extend(PRESET_EXTRAS.get(code.name, ()))
    entries.sort(key=lambda e: e[0])
    return tuple(w for _, w in entries), tuple(lab for lab, _ in entries)


def default_certificate(code: StabilizerCode, theta: float = 0.0,
                        alpha0: float = 0.0,
                        alphas: Sequence[float] | None = None,
                        mu: float = math.pi / 4,
                        extras: bool = True) -> SOSCertificate:
    if code.q != 2:
        raise CertificateError("Bell compilation is defined for qubit codes only")
    operators, labels = default_operators(code, extras=extras)
    if alphas is None:
        alphas = PRESET_ALPHAS.get(code.name, (1.0,) * len(operators))
    return SOSCertificate(
        n=code.n, theta=theta, alpha0=alpha0, alphas=tuple(alphas),
        operators=operators, pair_sites=code.pair_sites, mu=mu,
        labels=labels, code_name=code.name,
    )


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------

def substitute(word: XZWord, asg: MeasurementAssignment) -> BellPolynomial:
    """Expand an abstract X/Z word into a polynomial in the settings."""
    out = BellPolynomial.constant(1.0)
    for site, sym in word:
        kind, mu = asg.role(site)
        if kind == DIRECT:
            letter = A0 if sym == "X" else A1
            factor = BellPolynomial.monomial(Monomial.single(site, letter))
        else:
            if sym == "X":
                c = 1.0 / (2.0 * math.cos(mu))
                factor = BellPolynomial({
                    Monomial.single(site, A0): c,
                    Monomial.single(site, A1): c,
                })
            else:
                c = 1.0 / (2.0 * math.sin(mu))
                factor = BellPolynomial({
                    Monomial.single(site, A0): c,
                    Monomial.single(site, A1): -c,
                })
        out = out * factor
    return out


def build_tilted(theta: float, code: StabilizerCode,
                 asg: MeasurementAssignment) -> BellPolynomial:
    """The tilted logical operator cos(2 theta) Z-bar + sin(2 theta) X-bar."""
    if not 0.0 <= theta <= math.pi / 2:
        raise CertificateError(f"theta={theta} outside [0, pi/2]")
    zbar = substitute(xz_word_from_pauli(code.logical_z), asg)
    xbar = substitute(xz_word_from_pauli(code.logical_x), asg)
    return zbar.scale(math.cos(2 * theta)) + xbar.scale(math.sin(2 * theta))


def check_cancellation(cert: SOSCertificate,
                       asg: MeasurementAssignment | None = None
                       ) -> tuple[bool, BellPolynomial]:
    """Whether sum_i alpha_i S_i^2 collapses to the constant sum_i alpha_i."""
    asg = asg or cert.assignment()
    total = BellPolynomial.zero()
    for a, word in zip(cert.alphas, cert.operators):
        total = total + substitute(word, asg).square().scale(a)
    residual = total - BellPolynomial.constant(cert.alpha_sum())
    return residual.is_zero(SOS_TOL), residual


@dataclass(frozen=True)
class CompiledInequality:
    poly: BellPolynomial
    bound: float
    reduced_form: bool
    tilted: BellPolynomial
    certificate: SOSCertificate
    assignment: MeasurementAssignment


def build_bell(cert: SOSCertificate, code: StabilizerCode | None = None,
               asg: MeasurementAssignment | None = None) -> CompiledInequality:
    """Compile the certificate into its Bell polynomial and bound.

    When the squared operators cancel to a constant the reduced form
    -alpha0 P^2 + 2 alpha0 P + 2 sum alpha_i S_i is emitted with bound
    alpha0 + 2 sum alpha_i; otherwise the general form
    2 alpha0 P + 2 sum alpha_i S_i - sum alpha_i S_i^2 - alpha0 P^2 with
    bound alpha0 + sum alpha_i.
    """
    asg = asg or cert.assignment()
    subs = [substitute(w, asg) for w in cert.operators]

    if cert.alpha0 > 0:
        if code is None:
            raise CertificateError("alpha0 > 0 requires a code (for the logicals)")
        tilted = build_tilted(cert.theta, code, asg)
    else:
        tilted = BellPolynomial.zero()

    reduced, _ = check_cancellation(cert, asg)
    stab_part = BellPolynomial.zero()
    for a, s in zip(cert.alphas, subs):
        stab_part = stab_part + s.scale(2.0 * a)

    if reduced:
        poly = stab_part
        bound = cert.alpha0 + 2.0 * cert.alpha_sum()
    else:
        poly = stab_part
        for a, s in zip(cert.alphas, subs):
            poly = poly - s.square().scale(a)
        bound = cert.alpha0 + cert.alpha_sum()
    if cert.alpha0 > 0:
        poly = poly + tilted.scale(2.0 * cert.alpha0) - tilted.square().scale(cert.alpha0)

    poly.meta.update({
        "code": cert.code_name,
        "n": cert.n,
        "theta": cert.theta,
        "alpha0": cert.alpha0,
        "alpha": list(cert.alphas),
        "mu": cert.mu,
        "pair_sites": sorted(cert.pair_sites),
        "bound": bound,
        "reduced_form": reduced,
    })
    return CompiledInequality(poly, bound, reduced, tilted, cert, asg)


def verify_sos(cert: SOSCertificate, code: StabilizerCode | None = None,
               asg: MeasurementAssignment | None = None,
               compiled: CompiledInequality | None = None
               ) -> tuple[bool, BellPolynomial]:
    """Check bound - I == alpha0 (P-1)^2 + sum alpha_i (S_i-1)^2 exactly.

    A zero residual certifies <I> <= bound for every realization whose
    settings square to the identity.
    """
    asg = asg or cert.assignment()
    compiled = compiled or build_bell(cert, code, asg)
    one = BellPolynomial.constant(1.0)
    sos = BellPolynomial.zero()
    if cert.alpha0 > 0:
        diff = compiled.tilted - one
        sos = sos + diff.square().scale(cert.alpha0)
    for a, word in zip(cert.alphas, cert.operators):
        diff = substitute(word, asg) - one
        sos = sos + diff.square().scale(a)
    residual = (BellPolynomial.constant(compiled.bound) - compiled.poly) - sos
    return residual.is_zero(SOS_TOL), residual


# ---------------------------------------------------------------------------
# CHSH fixture
# ---------------------------------------------------------------------------

def chsh_certificate() -> SOSCertificate:
    """Two-site certificate whose compiled form is sqrt(2) times CHSH."""
    return SOSCertificate(
        n=2, theta=0.0, alpha0=0.0, alphas=(1.0, 1.0),
        operators=(xz_word([(1, "X"), (2, "X")]), xz_word([(1, "Z"), (2, "Z")])),
        pair_sites=frozenset({1}), code_name="chsh",
    )


def chsh_polynomial() -> BellPolynomial:
    """A0 B0 + A0 B1 + A1 B0 - A1 B1 with site 1 = Alice, site 2 = Bob."""
    poly = BellPolynomial({
        Monomial.from_dict({1: (A0,), 2: (A0,)}): 1.0,
        Monomial.from_dict({1: (A0,), 2: (A1,)}): 1.0,
        Monomial.from_dict({1: (A1,), 2: (A0,)}): 1.0,
        Monomial.from_dict({1: (A1,), 2: (A1,)}): -1.0,
    })
    poly.meta.update({"code": "chsh", "n": 2, "pair_sites": [1],
                      "bound": 2 * math.sqrt(2)})
    return poly


# ---------------------------------------------------------------------------
# Emission / parsing
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _emit_human(poly: BellPolynomial) -> str:
    if not poly.coeffs:
        return "0"
    pair_sites = poly.meta.get("pair_sites") or []
    if len(pair_sites) == 1:
        lines = _grouped_lines(poly, pair_sites[0])
    else:
        lines = [_term_line(c, mono) for mono, c in poly.terms()]
    return "\n".join(lines)


def _mono_body(mono: Monomial, skip_site: int | None = None) -> str:
    parts = []
    for site, word in mono.factors:
        if site == skip_site:
            continue
        parts.extend(f"A{letter}^{site}" for letter in word)
    return " ".join(parts)


def _term_line(coeff: float, mono: Monomial) -> str:
    body = _mono_body(mono)
    return f"{_fmt(coeff)} {body}".strip() if body else _fmt(coeff)


def _grouped_lines(poly: BellPolynomial, pair_site: int) -> list[str]:
    buckets: dict[tuple, dict[tuple, float]] = {}
    for mono, c in poly.terms():
        rest = tuple(f for f in mono.factors if f[0] != pair_site)
        buckets.setdefault(rest, {})[mono.word_at(pair_site)] = c
    lines = []
    for rest in sorted(buckets):
        words = buckets[rest]
        rest_body = _mono_body(Monomial(rest))
        plus, minus = words.get((A0,)), words.get((A1,))
        simple = set(words) <= {(), (A0,), (A1,)}
        if simple and plus is not None and minus is not None \
                and () not in words and abs(abs(plus) - abs(minus)) <= 1e-12:
            sign = "+" if plus * minus > 0 else "-"
            head = f"{_fmt(plus)} (A0^{pair_site} {sign} A1^{pair_site})"
            lines.append(f"{head} {rest_body}".strip())
        else:
            for word in sorted(words):
                mono = Monomial(tuple(sorted(rest + ((pair_site, word),)))
                                if word else rest)
                lines.append(_term_line(words[word], mono))
    return lines


def emit(poly: BellPolynomial, format: str = "human") -> str:
    """Render a polynomial; JSON output round-trips through parse()."""
    if format == "human":
        return _emit_human(poly)
    if format == "json":
        doc = {
            "meta": dict(sorted(poly.meta.items())),
            "terms": [
                {
                    "coeff": c,
                    "factors": [
                        {"site": site, "word": [f"A{letter}" for letter in word]}
                        for site, word in mono.factors
                    ],
                }
                for mono, c in poly.terms()
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=False)
    raise ValueError(f"unknown format {format!r} (expected 'human' or 'json')")


def parse(document: str | dict) -> BellPolynomial:
    """Inverse of emit(..., 'json')."""
    if isinstance(document, str):
        document = json.loads(document)
    coeffs: dict[Monomial, float] = {}
    for term in document.get("terms", ()):
        site_words = {}
        for factor in term.get("factors", ()):
            letters = []
            for name in factor["word"]:
                if name not in ("A0", "A1"):
                    raise ValueError(f"bad letter {name!r}")
                letters.append(A0 if name == "A0" else A1)
            site_words[int(factor["site"])] = letters
        mono = Monomial.from_dict(site_words)
        coeffs[mono] = coeffs.get(mono, 0.0) + float(term["coeff"])
    return BellPolynomial(coeffs, meta=document.get("meta"))
