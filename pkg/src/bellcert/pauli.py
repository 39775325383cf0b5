"""Phase-exact generalized Pauli algebra and stabilizer code presets.

Words are tracked over n sites with local dimension q >= 2.  The phase
group is the cyclic group of order 2q generated by tau = exp(i*pi/q), so
that products such as X*Z = -i*Y (q=2) are exactly representable and the
qudit commutation Z X = omega_q X Z stays exact.

Sites are 1-indexed in all public I/O; exponent vectors are stored
0-indexed internally (entry k belongs to site k+1).
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

MAX_DENSE_DIM = 2**14


class CodeValidationError(ValueError):
    """Raised when a stabilizer code document violates an invariant."""


def _as_expvec(values: Sequence[int], n: int, q: int, name: str) -> tuple[int, ...]:
    vec = tuple(int(v) % q for v in values)
    if len(vec) != n:
        raise ValueError(f"{name} must have length {n}, got {len(vec)}")
    return vec


@dataclass(frozen=True)
class PauliWord:
    """A generalized Pauli word tau^phase * prod_k X_k^{x_k} Z_k^{z_k}."""

    n: int
    q: int
    x_exp: tuple[int, ...]
    z_exp: tuple[int, ...]
    phase: int = 0  # exponent of tau = exp(i*pi/q), modulo 2q

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("local dimension q must be >= 2")
        if self.n < 0:
            raise ValueError("site count must be nonnegative")
        object.__setattr__(self, "x_exp", _as_expvec(self.x_exp, self.n, self.q, "x_exp"))
        object.__setattr__(self, "z_exp", _as_expvec(self.z_exp, self.n, self.q, "z_exp"))
        object.__setattr__(self, "phase", int(self.phase) % (2 * self.q))

    # -- constructors ---------------------------------------------------

    @classmethod
    def identity(cls, n: int, q: int = 2) -> "PauliWord":
        return cls(n, q, (0,) * n, (0,) * n, 0)

    @classmethod
    def from_factors(cls, n: int, factors: Iterable[tuple[int, str, int]],
                     q: int = 2, phase: int = 0) -> "PauliWord":
        """Build a word from (site, symbol, power) factors, sites 1-indexed.

        Same-site factors multiply in the order given, so mixed X/Z factors
        on one site accumulate the normal-ordering phase.
        """
        word = cls.identity(n, q)
        for site, sym, power in factors:
            if not 1 <= site <= n:
                raise ValueError(f"site {site} out of range 1..{n}")
            x = [0] * n
            z = [0] * n
            if sym == "X":
                x[site - 1] = power % q
            elif sym == "Z":
                z[site - 1] = power % q
            else:
                raise ValueError(f"unknown symbol {sym!r} (expected 'X' or 'Z')")
            word = word * cls(n, q, tuple(x), tuple(z), 0)
        if phase:
            word = PauliWord(n, q, word.x_exp, word.z_exp, word.phase + phase)
        return word

    # -- group operations -----------------------------------------------

    def __mul__(self, other: "PauliWord") -> "PauliWord":
        return mul(self, other)

    def dagger(self) -> "PauliWord":
        """Hermitian adjoint: reverses each site factor X^x Z^z -> Z^-z X^-x."""
        q = self.q
        # (X^x Z^z)^dag = Z^-z X^-x = omega^{xz} X^-x Z^-z
        cross = sum(x * z for x, z in zip(self.x_exp, self.z_exp))
        phase = (-self.phase + 2 * cross) % (2 * q)
        return PauliWord(self.n, q,
                         tuple((-x) % q for x in self.x_exp),
                         tuple((-z) % q for z in self.z_exp),
                         phase)

    def power(self, t: int) -> "PauliWord":
        if t < 0:
            return self.dagger().power(-t)
        out = PauliWord.identity(self.n, self.q)
        for _ in range(t):
            out = out * self
        return out

    @property
    def is_identity(self) -> bool:
        return (not any(self.x_exp) and not any(self.z_exp) and self.phase == 0)

    @property
    def weight(self) -> int:
        return sum(1 for x, z in zip(self.x_exp, self.z_exp) if x or z)

    def support(self) -> tuple[int, ...]:
        return tuple(k + 1 for k in range(self.n) if self.x_exp[k] or self.z_exp[k])

    # -- materialization -------------------------------------------------

    def matrix(self) -> np.ndarray:
        """Dense matrix of dimension q^n (exact up to float rounding)."""
        dim = self.q**self.n
        if dim > MAX_DENSE_DIM:
            raise ValueError(f"dimension {dim} exceeds dense cap {MAX_DENSE_DIM}")
        return apply_word(self, np.eye(dim, dtype=complex))

    def __str__(self) -> str:
        parts = []
        for k in range(self.n):
            x, z = self.x_exp[k], self.z_exp[k]
            if x:
                parts.append(f"X{k + 1}" + (f"^{x}" if x != 1 else ""))
            if z:
                parts.append(f"Z{k + 1}" + (f"^{z}" if z != 1 else ""))
        body = " ".join(parts) if parts else "I"
        if self.phase == 0:
            return body
        return f"tau^{self.phase} {body}"

    def to_json(self) -> dict:
        return {"x": list(self.x_exp), "z": list(self.z_exp), "phase": self.phase}


def mul(a: PauliWord, b: PauliWord) -> PauliWord:
    """Phase-exact product: matrix(mul(a, b)) == matrix(a) @ matrix(b)."""
    if a.n != b.n or a.q != b.q:
        raise ValueError(f"incompatible words: n={a.n},q={a.q} vs n={b.n},q={b.q}")
    q = a.q
    # Per site: X^xa Z^za X^xb Z^zb = omega^{za*xb} X^{xa+xb} Z^{za+zb}
    cross = sum(za * xb for za, xb in zip(a.z_exp, b.x_exp))
    return PauliWord(
        a.n, q,
        tuple((xa + xb) % q for xa, xb in zip(a.x_exp, b.x_exp)),
        tuple((za + zb) % q for za, zb in zip(a.z_exp, b.z_exp)),
        (a.phase + b.phase + 2 * cross) % (2 * q),
    )


def comm_exponent(a: PauliWord, b: PauliWord) -> int:
    """The e in a*b = omega_q^e * b*a (symplectic form of the exponent vectors)."""
    if a.n != b.n or a.q != b.q:
        raise ValueError("incompatible words")
    e = sum(za * xb - zb * xa
            for za, xb, zb, xa in zip(a.z_exp, b.x_exp, b.z_exp, a.x_exp))
    return e % a.q


def apply_word(word: PauliWord, vecs: np.ndarray) -> np.ndarray:
    """Apply a Pauli word to column vectors without building its dense matrix.

    Basis states are indexed by base-q digit strings d_1..d_n (site 1 = most
    significant).  X^x Z^z |d> = omega^{z d} |d + x>.
    """
    n, q = word.n, word.q
    dim = q**n
    if vecs.shape[0] != dim:
        raise ValueError(f"vector dimension {vecs.shape[0]} != q^n = {dim}")
    idx = np.arange(dim)
    phase_exp = np.zeros(dim, dtype=np.int64)  # tau exponent per basis state
    new_idx = np.zeros(dim, dtype=np.int64)
    for k in range(n):
        stride = q**(n - 1 - k)
        digit = (idx // stride) % q
        phase_exp += 2 * word.z_exp[k] * digit
        new_idx += ((digit + word.x_exp[k]) % q) * stride
    phase_exp = (phase_exp + word.phase) % (2 * q)
    if q == 2:
        phases = np.array([1, 1j, -1, -1j], dtype=complex)[phase_exp]
    else:
        phases = np.exp(1j * math.pi * phase_exp / q)
    out = np.zeros_like(vecs, dtype=complex)
    out[new_idx] = (phases[:, None] if vecs.ndim == 2 else phases) * vecs[idx]
    return out


# ---------------------------------------------------------------------------
# Stabilizer codes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StabilizerCode:
    """A stabilizer code: commuting generators plus one logical X/Z pair."""

    name: str
    n: int
    k: int
    q: int
    generators: tuple[PauliWord, ...]
    logical_x: PauliWord
    logical_z: PauliWord
    pair_sites: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "pair_sites", frozenset(int(s) for s in self.pair_sites))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "k": self.k,
            "q": self.q,
            "generators": [g.to_json() for g in self.generators],
            "logical_x": self.logical_x.to_json(),
            "logical_z": self.logical_z.to_json(),
            "pair_sites": sorted(self.pair_sites),
        }


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    for p in range(2, int(math.isqrt(q)) + 1):
        if q % p == 0:
            return False
    return True


def symplectic_rank(generators: Sequence[PauliWord], q: int) -> int:
    """Rank of the stacked (x|z) exponent matrix over Z_q (q prime)."""
    if not generators:
        return 0
    rows = [list(g.x_exp) + list(g.z_exp) for g in generators]
    m, w = len(rows), len(rows[0])
    rank = 0
    col = 0
    while rank < m and col < w:
        piv = next((r for r in range(rank, m) if rows[r][col] % q), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, q)
        rows[rank] = [(v * inv) % q for v in rows[rank]]
        for r in range(m):
            if r != rank and rows[r][col] % q:
                f = rows[r][col]
                rows[r] = [(a - f * b) % q for a, b in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def stabilizer_group(generators: Sequence[PauliWord]) -> list[PauliWord]:
    """All q^m products of the generators (phases tracked)."""
    if not generators:
        return []
    q = generators[0].q
    group = [PauliWord.identity(generators[0].n, q)]
    for g in generators:
        powers = [PauliWord.identity(g.n, q)]
        for _ in range(q - 1):
            powers.append(powers[-1] * g)
        group = [h * p for h in group for p in powers[1:]] + group
    # deduplicate (generators are expected independent, but be safe)
    seen = {}
    for w in group:
        seen[(w.x_exp, w.z_exp, w.phase)] = w
    return list(seen.values())


def validate_code(code: StabilizerCode) -> StabilizerCode:
    """Check all structural invariants; raises CodeValidationError on failure."""
    n, q = code.n, code.q
    if not _is_prime(q):
        raise CodeValidationError(f"local dimension q={q} must be prime")
    for g in code.generators:
        if g.n != n or g.q != q:
            raise CodeValidationError("generator size/modulus mismatch")
    for w, label in ((code.logical_x, "logical_x"), (code.logical_z, "logical_z")):
        if w.n != n or w.q != q:
            raise CodeValidationError(f"{label} size/modulus mismatch")
    for s in code.pair_sites:
        if not 1 <= s <= n:
            raise CodeValidationError(f"pair site {s} out of range 1..{n}")
    m = len(code.generators)
    for i in range(m):
        for j in range(i + 1, m):
            e = comm_exponent(code.generators[i], code.generators[j])
            if e != 0:
                raise CodeValidationError(
                    f"generators not Abelian: S_{i + 1}, S_{j + 1} "
                    f"have commutation exponent {e}")
    for i, g in enumerate(code.generators):
        if not g.power(q).is_identity:
            raise CodeValidationError(
                f"generator S_{i + 1} does not satisfy S^q = I exactly "
                "(no +1 eigenspace)")
    rank = symplectic_rank(code.generators, q)
    if rank != m:
        raise CodeValidationError(f"generators dependent: rank {rank} < {m}")
    if n - rank != code.k:
        raise CodeValidationError(
            f"declared k={code.k} inconsistent with n - rank = {n - rank}")
    for i, g in enumerate(code.generators):
        if comm_exponent(code.logical_x, g) != 0:
            raise CodeValidationError(f"logical_x does not commute with S_{i + 1}")
        if comm_exponent(code.logical_z, g) != 0:
            raise CodeValidationError(f"logical_z does not commute with S_{i + 1}")
    if q == 2 and code.k > 0:
        if comm_exponent(code.logical_x, code.logical_z) != 1:
            raise CodeValidationError("logical_x and logical_z must anticommute")
    # For q > 2 the transversal logicals of the cyclic five-qudit code commute
    # with each other when q divides n, so no pair-exponent constraint is
    # enforced beyond commuting with the generators.
    if q**n <= 2**10:
        dim = codespace_dimension(code)
        if dim != q**code.k:
            raise CodeValidationError(
                f"joint +1 eigenspace has dimension {dim}, expected q^k = {q**code.k}")
    return code


def codespace_dimension(code: StabilizerCode) -> int:
    """Trace of the joint +1 projector, via the group average.

    tr(P) = (1/|G|) sum_g tr(g); every non-identity word is traceless, so
    only scalar group elements contribute.
    """
    dim = code.q**code.n
    group = stabilizer_group(code.generators)
    tr = 0.0 + 0.0j
    tau = cmath.exp(1j * math.pi / code.q)
    for g in group:
        if not any(g.x_exp) and not any(g.z_exp):
            tr += tau**g.phase * dim
    return int(round((tr / len(group)).real))


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def _word(n: int, spec: Mapping[int, str], q: int = 2,
          powers: Mapping[int, int] | None = None) -> PauliWord:
    factors = []
    for site in sorted(spec):
        power = (powers or {}).get(site, 1)
        factors.append((site, spec[site], power))
    return PauliWord.from_factors(n, factors, q=q)


PRESET_NAMES = ("five_qubit", "steane", "shor", "five_qudit")


def code_preset(name: str, q: int | None = None) -> StabilizerCode:
    """Return a named code preset.

    ``five_qudit`` takes the local dimension either as the ``q`` argument or
    inline as ``five_qudit:3``; it defaults to q=3.
    """
    base = name
    if ":" in name:
        base, _, qstr = name.partition(":")
        q = int(qstr)
    if base == "five_qubit":
        gens = (
            _word(5, {1: "X", 2: "Z", 3: "Z", 4: "X"}),
            _word(5, {2: "X", 3: "Z", 4: "Z", 5: "X"}),
            _word(5, {1: "X", 3: "X", 4: "Z", 5: "Z"}),
            _word(5, {1: "Z", 2: "X", 4: "X", 5: "Z"}),
        )
        return StabilizerCode(
            "five_qubit", 5, 1, 2, gens,
            logical_x=_word(5, {s: "X" for s in range(1, 6)}),
            logical_z=_word(5, {s: "Z" for s in range(1, 6)}),
            pair_sites=frozenset({1}),
        )
    if base == "steane":
        gens = (
            _word(7, {4: "X", 5: "X", 6: "X", 7: "X"}),
            _word(7, {2: "X", 3: "X", 6: "X", 7: "X"}),
            _word(7, {1: "X", 3: "X", 5: "X", 7: "X"}),
            _word(7, {4: "Z", 5: "Z", 6: "Z", 7: "Z"}),
            _word(7, {2: "Z", 3: "Z", 6: "Z", 7: "Z"}),
            _word(7, {1: "Z", 3: "Z", 5: "Z", 7: "Z"}),
        )
        return StabilizerCode(
            "steane", 7, 1, 2, gens,
            logical_x=_word(7, {s: "X" for s in range(1, 8)}),
            logical_z=_word(7, {s: "Z" for s in range(1, 8)}),
            pair_sites=frozenset({2, 3, 5, 7}),
        )
    if base == "shor":
        gens = (
            _word(9, {1: "Z", 2: "Z"}),
            _word(9, {1: "Z", 3: "Z"}),
            _word(9, {4: "Z", 5: "Z"}),
            _word(9, {4: "Z", 6: "Z"}),
            _word(9, {7: "Z", 8: "Z"}),
            _word(9, {7: "Z", 9: "Z"}),
            _word(9, {s: "X" for s in (1, 2, 3, 4, 5, 6)}),
            _word(9, {s: "X" for s in (1, 2, 3, 7, 8, 9)}),
        )
        return StabilizerCode(
            "shor", 9, 1, 2, gens,
            logical_x=_word(9, {s: "X" for s in range(1, 10)}),
            logical_z=_word(9, {s: "Z" for s in range(1, 10)}),
            pair_sites=frozenset({1, 4, 7}),
        )
    if base == "five_qudit":
        qq = 3 if q is None else int(q)
        if qq < 2:
            raise CodeValidationError("five_qudit requires q >= 2")
        if not _is_prime(qq):
            raise CodeValidationError(f"five_qudit requires prime q, got {qq}")
        inv = qq - 1  # dagger exponent
        gens = (
            _word(5, {1: "X", 2: "Z", 3: "Z", 4: "X"}, q=qq, powers={3: inv, 4: inv}),
            _word(5, {2: "X", 3: "Z", 4: "Z", 5: "X"}, q=qq, powers={4: inv, 5: inv}),
            _word(5, {3: "X", 4: "Z", 5: "Z", 1: "X"}, q=qq, powers={5: inv, 1: inv}),
            _word(5, {4: "X", 5: "Z", 1: "Z", 2: "X"}, q=qq, powers={1: inv, 2: inv}),
        )
        return StabilizerCode(
            f"five_qudit:{qq}", 5, 1, qq, gens,
            logical_x=_word(5, {s: "X" for s in range(1, 6)}, q=qq),
            logical_z=_word(5, {s: "Z" for s in range(1, 6)}, q=qq),
            pair_sites=frozenset({1}),
        )
    raise KeyError(f"unknown code preset {name!r}; known: {', '.join(PRESET_NAMES)}")


# ---------------------------------------------------------------------------
# JSON loading
# ---------------------------------------------------------------------------

def _word_from_json(doc: Mapping, n: int, q: int, label: str) -> PauliWord:
    try:
        return PauliWord(n, q, tuple(doc["x"]), tuple(doc["z"]),
                         int(doc.get("phase", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise CodeValidationError(f"malformed {label}: {exc}") from exc


def load_code(document: Mapping | str) -> StabilizerCode:
    """Parse and validate a code document (dict or JSON string)."""
    if isinstance(document, str):
        document = json.loads(document)
    try:
        name = str(document["name"])
        n = int(document["n"])
        k = int(document["k"])
        q = int(document["q"])
        gen_docs = document["generators"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CodeValidationError(f"malformed code document: {exc}") from exc
    if n < 1:
        raise CodeValidationError("n must be positive")
    gens = tuple(_word_from_json(g, n, q, f"generator {i + 1}")
                 for i, g in enumerate(gen_docs))
    code = StabilizerCode(
        name, n, k, q, gens,
        logical_x=_word_from_json(document["logical_x"], n, q, "logical_x"),
        logical_z=_word_from_json(document["logical_z"], n, q, "logical_z"),
        pair_sites=frozenset(int(s) for s in document.get("pair_sites", ())),
    )
    return validate_code(code)
