"""Saturation-based deduction engine for the self-testing decision problem.

Hypotheses: a set of operator words fixing the state (S psi = psi), an
anticommuting-pair site subset A where Z X = omega X Z holds as an operator
identity, and operator q-th-power identities X^q = Z^q = 1 at the remaining
sites.  The engine derives on-state facts (word psi = omega^e psi) and
per-site commutation-phase facts, and decides whether the goal (squared
identities plus commutation phase 1 at every site) follows.

The calculus is sound for q = 2.  For q > 2 the per-site commutation
exponent is recorded pattern-blind (a relation derived for daggered powers
is not re-normalized), which is exactly the bookkeeping that makes the
qudit generalization fail: two derivations can assign one site exponents
e and -e, a contradiction unless omega = omega^-1.

Site words at non-pair sites are free products of X/Z runs (no commutation
is assumed inside a site); pair-site words normalize to X-power-then-Z-power
using the hypothesis identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .pauli import PauliWord, StabilizerCode

PROVED = "proved"
CONTRADICTION = "contradiction"
UNKNOWN = "unknown"

# site word: tuple of (sym, power) runs; word: tuple of (site, site_word)
SiteRuns = tuple[tuple[str, int], ...]
Word = tuple[tuple[int, SiteRuns], ...]


class ProblemError(ValueError):
    """Raised for malformed deduction problems."""


@dataclass(frozen=True)
class Hypotheses:
    n: int
    q: int
    pair_sites: frozenset[int]

    def is_pair(self, site: int) -> bool:
        return site in self.pair_sites


@dataclass(frozen=True)
class Problem:
    """Operators fixing the state plus the candidate pair-site subset."""

    n: int
    q: int
    pair_sites: frozenset[int]
    operators: tuple[tuple[tuple[int, str, int], ...], ...]
    name: str = ""

    def __post_init__(self):
        if self.q < 2:
            raise ProblemError("q must be >= 2")
        object.__setattr__(self, "pair_sites",
                           frozenset(int(s) for s in self.pair_sites))
        for s in self.pair_sites:
            if not 1 <= s <= self.n:
                raise ProblemError(f"pair site {s} out of range")
        ops = []
        for op in self.operators:
            factors = []
            for site, sym, power in op:
                site, power = int(site), int(power)
                if not 1 <= site <= self.n:
                    raise ProblemError(f"operator site {site} out of range")
                if sym not in ("X", "Z"):
                    raise ProblemError(f"bad symbol {sym!r}")
                if self.q == 2 and power < 0 and site in self.pair_sites:
                    raise ProblemError(
                        "negative powers at pair sites are ill-formed for q=2 "
                        "(pair-site symbols are Hermitian but not unitary)")
                factors.append((site, sym, power))
            ops.append(tuple(factors))
        object.__setattr__(self, "operators", tuple(ops))

    def hypotheses(self) -> Hypotheses:
        return Hypotheses(self.n, self.q, self.pair_sites)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "q": self.q,
            "pair_sites": sorted(self.pair_sites),
            "operators": [[[s, sym, p] for s, sym, p in op]
                          for op in self.operators],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "Problem":
        return cls(
            n=int(doc["n"]), q=int(doc.get("q", 2)),
            pair_sites=frozenset(doc.get("pair_sites", ())),
            operators=tuple(tuple((int(s), str(sym), int(p)) for s, sym, p in op)
                            for op in doc["operators"]),
            name=str(doc.get("name", "")),
        )


@dataclass(frozen=True)
class Budget:
    """Search limits; results are monotone in every field.

    ``combine`` selects which fact pairs the product rule tries: ``"even"``
    (default) pairs only facts whose run powers are all even, the family
    the squared-identity derivations live in; ``"all"`` lifts the policy.
    """

    max_facts: int = 5000
    max_word_letters: int = 16
    max_products: int = 100_000
    max_rounds: int = 64
    combine: str = "even"


# ---------------------------------------------------------------------------
# Word normalization
#
# normalize(factors) returns (word, ph) with
#     operator(factors) == omega^ph * operator(word).
# ---------------------------------------------------------------------------

def _merge_runs(runs: list[tuple[str, int]], q: int, reduce_mod: bool,
                hermitian: bool) -> list[tuple[str, int]]:
    out: list[tuple[str, int]] = []
    for sym, power in runs:
        if hermitian and power < 0:
            power = -power
        if reduce_mod:
            power %= q
        if power == 0:
            continue
        if out and out[-1][0] == sym:
            prev = out.pop()[1] + power
            if hermitian and prev < 0:
                prev = -prev
            if reduce_mod:
                prev %= q
            if prev:
                out.append((sym, prev))
        else:
            out.append((sym, power))
    return out


def _normalize_site(runs: list[tuple[str, int]], site: int,
                    hyp: Hypotheses) -> tuple[SiteRuns, int]:
    """Site-local normal form and the omega-phase extracted from it."""
    q = hyp.q
    is_pair = hyp.is_pair(site)
    hermitian = (q == 2)
    reduce_mod = not is_pair  # X^q = Z^q = 1 holds as operators off the pair set
    phase = 0
    runs = _merge_runs(list(runs), q, reduce_mod, hermitian)
    if is_pair:
        # Sort X runs before Z runs; each adjacent (Z^b, X^a) swap extracts
        # omega^{ab} via the operator identity Z X = omega X Z.
        changed = True
        while changed:
            changed = False
            for i in range(len(runs) - 1):
                (s1, p1), (s2, p2) = runs[i], runs[i + 1]
                if s1 == "Z" and s2 == "X":
                    phase += p1 * p2
                    runs[i], runs[i + 1] = runs[i + 1], runs[i]
                    changed = True
            if changed:
                runs = _merge_runs(runs, q, reduce_mod, hermitian)
    return tuple(runs), phase % q


def normalize(factors: Iterable[tuple[int, str, int]],
              hyp: Hypotheses) -> tuple[Word, int]:
    per_site: dict[int, list[tuple[str, int]]] = {}
    for site, sym, power in factors:
        per_site.setdefault(site, []).append((sym, int(power)))
    phase = 0
    items = []
    for site in sorted(per_site):
        runs, ph = _normalize_site(per_site[site], site, hyp)
        phase += ph
        if runs:
            items.append((site, runs))
    return tuple(items), phase % hyp.q


def word_product(a: Word, b: Word, hyp: Hypotheses) -> tuple[Word, int]:
    factors = [(site, sym, power) for site, runs in a for sym, power in runs]
    factors += [(site, sym, power) for site, runs in b for sym, power in runs]
    return normalize(factors, hyp)


def word_dagger(a: Word, hyp: Hypotheses) -> tuple[Word, int]:
    """Adjoint word (q > 2 only; relies on the unitarity axiom)."""
    factors = []
    for site, runs in a:
        for sym, power in reversed(runs):
            factors.append((site, sym, -power))
    return normalize(factors, hyp)


def word_letters(a: Word) -> int:
    return sum(abs(p) for _, runs in a for _, p in runs)


def word_all_even(a: Word) -> bool:
    return all(p % 2 == 0 for _, runs in a for _, p in runs)


def render_word(a: Word) -> str:
    if not a:
        return "1"
    parts = []
    for site, runs in a:
        for sym, power in runs:
            parts.append(f"{sym}{site}" if power == 1 else f"{sym}{site}^{power}")
    return " ".join(parts)


def _site_suffix_split(runs: SiteRuns, suffix: SiteRuns) -> SiteRuns | None:
    """Strip `suffix` off the right end of `runs`; None if it does not fit."""
    runs_l = list(runs)
    for si in range(len(suffix) - 1, -1, -1):
        if not runs_l:
            return None
        sym_s, pow_s = suffix[si]
        sym_w, pow_w = runs_l[-1]
        if sym_w != sym_s or pow_w * pow_s <= 0 or abs(pow_w) < abs(pow_s):
            return None
        leftover = pow_w - pow_s
        if leftover:
            # A partial run may only be the last (leftmost) suffix run
            # consumed; otherwise the leftover blocks the next suffix run,
            # which carries the other symbol.
            if si > 0:
                return None
            runs_l[-1] = (sym_w, leftover)
        else:
            runs_l.pop()
    return tuple(runs_l)


def _suffix_split(word: Word, suffix: Word) -> Word | None:
    """word = rest * suffix with per-site suffix matching, else None."""
    sdict = dict(suffix)
    out = []
    for site, runs in word:
        fruns = sdict.pop(site, None)
        if fruns is None:
            out.append((site, runs))
            continue
        rest = _site_suffix_split(runs, fruns)
        if rest is None:
            return None
        if rest:
            out.append((site, rest))
    if sdict:
        return None
    return tuple(out)


def _single_transposed_site(a: Word, b: Word) -> tuple[int, int] | None:
    """If a and b differ only by transposing one two-run site, return it.

    Returns (site, orientation); orientation is +1 when `a` carries the
    Z-then-X order at that site, so that a known site commutation fact
    Z X psi = omega^e X Z psi maps a-applied-to-psi onto omega^e b psi.
    Only single positive powers qualify.
    """
    if len(a) != len(b):
        return None
    found: tuple[int, int] | None = None
    for (sa, ra), (sb, rb) in zip(a, b):
        if sa != sb:
            return None
        if ra == rb:
            continue
        if found is not None:
            return None
        if len(ra) != 2 or len(rb) != 2 or ra[0] != rb[1] or ra[1] != rb[0]:
            return None
        (sym1, p1), (sym2, p2) = ra
        if sym1 == sym2 or p1 != 1 or p2 != 1:
            return None
        found = (sa, 1 if sym1 == "Z" else -1)
    return found


# ---------------------------------------------------------------------------
# Deduction state
# ---------------------------------------------------------------------------

@dataclass
class Fact:
    idx: int
    word: Word
    phase: int  # omega exponent: word |psi> = omega^phase |psi>
    rule: str
    premises: tuple[int, ...] = ()
    site_set: frozenset[int] = frozenset()

    def __post_init__(self):
        self.site_set = frozenset(site for site, _ in self.word)


@dataclass
class Step:
    rule: str
    premises: tuple[int, ...]
    text: str


@dataclass
class Transcript:
    steps: list[Step] = field(default_factory=list)
    status_line: str = ""

    def add(self, rule: str, premises: tuple[int, ...], text: str):
        self.steps.append(Step(rule, premises, text))

    def rule_applications(self) -> int:
        return sum(1 for s in self.steps if s.rule not in ("seed", "hypothesis"))

    def to_json(self) -> dict:
        return {
            "steps": [{"rule": s.rule, "premises": list(s.premises),
                       "text": s.text} for s in self.steps],
            "status": self.status_line,
        }


def transcript_render(transcript: Transcript) -> str:
    lines = [step.text for step in transcript.steps]
    if transcript.status_line:
        lines.append(transcript.status_line)
    return "\n".join(lines)


@dataclass
class DeduceResult:
    status: str
    transcript: Transcript
    facts: list[Fact]
    pair_comm: dict[int, int]
    rounds: int
    reason: str = ""

    @property
    def proved(self) -> bool:
        return self.status == PROVED


class _Engine:
    def __init__(self, problem: Problem, budget: Budget):
        self.problem = problem
        self.budget = budget
        self.hyp = problem.hypotheses()
        self.q = problem.q
        self.facts: list[Fact] = []
        self.by_word: dict[Word, Fact] = {}
        self.pair_comm: dict[int, int] = {}
        self.transcript = Transcript()
        self.contradiction: str | None = None
        self.products_used = 0
        self.r4_done: set[tuple[int, int, int]] = set()

    # -- fact bookkeeping -------------------------------------------------

    def _rewrite(self, word: Word, phase: int) -> tuple[Word, int]:
        """Cancel fact words appearing as per-site suffixes (valid adjacent
        to the state, which every stored fact is)."""
        changed = True
        while changed and word:
            changed = False
            sites = frozenset(site for site, _ in word)
            for fact in self.facts:
                if not fact.word or not fact.site_set <= sites:
                    continue
                split = _suffix_split(word, fact.word)
                if split is None or split == word:
                    continue
                word = split
                phase = (phase - fact.phase) % self.q
                changed = True
                break
        return word, phase

    def add_fact(self, word: Word, phase: int, rule: str,
                 premises: tuple[int, ...] = ()) -> Fact | None:
        """Record a normalized on-state equation; flags contradictions."""
        if self.contradiction:
            return None
        phase %= self.q
        word, phase = self._rewrite(word, phase)
        if not word:
            if phase != 0:
                self._flag_contradiction(
                    f"scalar equation omega^{phase} psi = psi with "
                    f"{phase} != 0", rule, premises)
            return None
        if word_letters(word) > self.budget.max_word_letters:
            return None
        known = self.by_word.get(word)
        if known is not None:
            if known.phase != phase:
                self._flag_contradiction(
                    f"state equation {render_word(word)} carries phases "
                    f"omega^{known.phase} (fact {known.idx}) and omega^{phase}",
                    rule, premises + (known.idx,))
            return None
        if len(self.facts) >= self.budget.max_facts:
            return None
        fact = Fact(len(self.facts), word, phase, rule, premises)
        self.facts.append(fact)
        self.by_word[word] = fact
        prem = f"({','.join(map(str, premises))})" if premises else ""
        rhs = "psi" if phase == 0 else f"omega^{phase} psi"
        self.transcript.add(rule, premises,
                            f"[{fact.idx}] {rule}{prem}: "
                            f"{render_word(word)} psi = {rhs}")
        return fact

    def _flag_contradiction(self, text: str, rule: str,
                            premises: tuple[int, ...]):
        self.contradiction = text
        self.transcript.add(rule, premises, f"contradiction ({rule}): {text}")

    def add_pair_comm(self, site: int, exponent: int, rule: str,
                      premises: tuple[int, ...], detail: str = ""):
        if self.contradiction:
            return
        exponent %= self.q
        known = self.pair_comm.get(site)
        prem = f"({','.join(map(str, premises))})" if premises else ""
        if known is None:
            self.pair_comm[site] = exponent
            note = f" [{detail}]" if detail else ""
            self.transcript.add(rule, premises,
                                f"{rule}{prem}: site {site} commutation "
                                f"Z X psi = omega^{exponent} X Z psi{note}")
        elif known != exponent:
            self._flag_contradiction(
                f"site {site} pair exponents clash: omega^{known} vs "
                f"omega^{exponent}", rule, premises)

    # -- goal ---------------------------------------------------------------

    def _square_known(self, site: int, sym: str) -> bool:
        if self.q == 2 and not self.hyp.is_pair(site):
            return True  # operator hypothesis off the pair set
        fact = self.by_word.get(((site, ((sym, 2),)),))
        return fact is not None and fact.phase == 0

    def goal_met(self) -> bool:
        for site in range(1, self.problem.n + 1):
            if self.pair_comm.get(site) != 1 % self.q:
                return False
            if not (self._square_known(site, "X") and self._square_known(site, "Z")):
                return False
        return True

    # -- rules --------------------------------------------------------------

    def seed(self):
        for site in sorted(self.hyp.pair_sites):
            self.add_pair_comm(site, 1, "hypothesis", (),
                               detail="anticommuting-pair site")
        for op in self.problem.operators:
            word, ph = normalize(op, self.hyp)
            fact = self.add_fact(word, -ph, "seed")
            if self.contradiction:
                return
            if self.q > 2 and fact is not None:
                dag, dph = word_dagger(fact.word, self.hyp)
                self.add_fact(dag, -fact.phase - dph, "adjoint", (fact.idx,))

    def r2_powers(self, fact: Fact):
        """Powers W^t for t = 2..q of a state equation."""
        word, phase = fact.word, fact.phase
        for _t in range(2, self.q + 1):
            word, ph = word_product(word, fact.word, self.hyp)
            phase = (phase + fact.phase - ph) % self.q
            self.add_fact(word, phase, "power", (fact.idx,))
            if self.contradiction or not word:
                return

    def r5_hermitian_root(self, fact: Fact):
        """A Hermitian with A^4 psi = psi forces A^2 psi = psi (q = 2 only)."""
        if self.q != 2 or fact.phase != 0 or len(fact.word) != 1:
            return
        site, runs = fact.word[0]
        if len(runs) == 1 and runs[0][1] == 4:
            sym = runs[0][0]
            self.add_fact(((site, ((sym, 2),)),), 0, "hermitian-root",
                          (fact.idx,))

    def reduce_phase(self, start: int):
        """Propagate facts added this round through the existing base.

        Suffix rewriting at insertion only reduces the new word by old
        facts; a fresh squared identity must also shorten the older facts
        it appears in (X7^2 psi = psi turns X1^2 X7^2 psi = psi into
        X1^2 psi = psi), so reductions of old-by-new are emitted as facts.
        """
        queue = list(range(start, len(self.facts)))
        qi = 0
        while qi < len(queue):
            if self.contradiction:
                return
            new = self.facts[queue[qi]]
            qi += 1
            for old in self.facts[:]:
                if old.idx == new.idx or not new.site_set <= old.site_set:
                    continue
                if word_letters(old.word) <= word_letters(new.word):
                    continue
                split = _suffix_split(old.word, new.word)
                if split is None or split == old.word:
                    continue
                added = self.add_fact(split, old.phase - new.phase, "reduce",
                                      (old.idx, new.idx))
                if self.contradiction:
                    return
                if added is not None:
                    queue.append(added.idx)

    def r3_combine(self, a: Fact, b: Fact):
        if not (a.site_set & b.site_set):
            return  # disjoint products never feed the goal rules
        if self.budget.combine == "even" and not (
                word_all_even(a.word) and word_all_even(b.word)):
            return
        if word_letters(a.word) + word_letters(b.word) > self.budget.max_word_letters:
            return  # normalization and rewriting only shrink words
        if self.products_used >= self.budget.max_products:
            return
        self.products_used += 1
        word, ph = word_product(a.word, b.word, self.hyp)
        self.add_fact(word, a.phase + b.phase - ph, "combine", (a.idx, b.idx))

    def _solves(self) -> dict[int, dict[str, list[tuple[int, Fact, Word]]]]:
        """site -> sym -> [(solved power +-1, fact, rest word)].

        A fact whose site-m part is a single X^a run isolates
        X_m^{-a} psi = omega^{-phase} * rest psi.  Off the pair set the
        operator identity X^q = 1 folds -a mod q; on pair sites (q > 2)
        only literal powers +-1 qualify since no power identity is known.
        """
        out: dict[int, dict[str, list[tuple[int, Fact, Word]]]] = {}
        for fact in self.facts:
            for pos, (site, runs) in enumerate(fact.word):
                if len(runs) != 1:
                    continue
                sym, power = runs[0]
                if self.q == 2:
                    if self.hyp.is_pair(site) or power != 1:
                        continue
                    solved = 1
                elif self.hyp.is_pair(site):
                    if power == -1:
                        solved = 1
                    elif power == 1:
                        solved = -1
                    else:
                        continue
                else:
                    residue = (-power) % self.q
                    if residue == 1:
                        solved = 1
                    elif residue == self.q - 1:
                        solved = -1
                    else:
                        continue
                rest = fact.word[:pos] + fact.word[pos + 1:]
                out.setdefault(site, {}).setdefault(sym, []).append(
                    (solved, fact, rest))
        return out

    def r4_transfer(self):
        """Derive site commutation phases from paired solved forms.

        With X_m^{px} psi = omega^{cu} U psi and Z_m^{pz} psi =
        omega^{cv} V psi, comparing U V psi against V U psi yields
        Z^{pz} X^{px} psi = omega^e X^{px} Z^{pz} psi whenever the two
        products normalize to the same word, or differ at one site whose
        commutation fact is already known (that site's factors commute to
        the state side).  The exponent is recorded per site.
        """
        solves = self._solves()
        for site in sorted(solves):
            entry = solves[site]
            for (px, fx, u_rest), (pz, fz, v_rest) in itertools.product(
                    entry.get("X", ()), entry.get("Z", ())):
                key = (fx.idx, fz.idx, site)
                if key in self.r4_done:
                    continue
                uv, ph1 = word_product(u_rest, v_rest, self.hyp)
                vu, ph2 = word_product(v_rest, u_rest, self.hyp)
                uv, ph1 = self._rewrite(uv, ph1)
                vu, ph2 = self._rewrite(vu, ph2)
                if uv == vu:
                    self.r4_done.add(key)
                    self.add_pair_comm(site, ph1 - ph2, "solve-transfer",
                                       (fx.idx, fz.idx),
                                       detail=f"powers ({px},{pz})")
                else:
                    blocked = _single_transposed_site(uv, vu)
                    if blocked is None:
                        self.r4_done.add(key)  # structurally unusable
                        continue
                    bsite, orientation = blocked
                    known = self.pair_comm.get(bsite)
                    if known is None:
                        continue  # retry once a commutation fact lands there
                    self.r4_done.add(key)
                    self.add_pair_comm(site, ph1 + orientation * known - ph2,
                                       "solve-transfer", (fx.idx, fz.idx),
                                       detail=f"via site {bsite} commutation")
                if self.contradiction:
                    return

    # -- main loop -----------------------------------------------------------

    def _budget_hit(self) -> bool:
        return (len(self.facts) >= self.budget.max_facts
                or self.products_used >= self.budget.max_products)

    def run(self) -> DeduceResult:
        self.seed()
        frontier = list(self.facts)
        rounds = 0
        status = reason = None
        while True:
            if self.contradiction:
                status, reason = CONTRADICTION, self.contradiction
                break
            if self.goal_met():
                status, reason = PROVED, ""
                break
            if not frontier:
                status, reason = UNKNOWN, "saturated without reaching the goal"
                break
            if rounds >= self.budget.max_rounds or self._budget_hit():
                status, reason = UNKNOWN, "budget exhausted"
                break
            rounds += 1
            mark = len(self.facts)
            for fact in frontier:
                self.r2_powers(fact)
                if self.contradiction:
                    break
                self.r5_hermitian_root(fact)
                if self.contradiction:
                    break
            if not self.contradiction:
                self.r4_transfer()
            if not self.contradiction and not self.goal_met():
                known = self.facts[:mark]
                for a in frontier:
                    if self.contradiction:
                        break
                    for b in known:
                        self.r3_combine(a, b)
                        self.r3_combine(b, a)
                        if self.contradiction:
                            break
                for a in frontier:
                    if self.contradiction:
                        break
                    for b in frontier:
                        self.r3_combine(a, b)
                        if self.contradiction:
                            break
            if not self.contradiction:
                self.reduce_phase(mark)
            frontier = self.facts[mark:]

        apps = self.transcript.rule_applications()
        if status == PROVED:
            self.transcript.status_line = (
                f"proved: goal reached after {apps} rule applications")
        elif status == CONTRADICTION:
            self.transcript.status_line = f"contradiction: {reason}"
        else:
            self.transcript.status_line = f"unknown: {reason}"
        return DeduceResult(status, self.transcript, self.facts,
                            dict(self.pair_comm), rounds, reason)


def deduce(problem: Problem, budget: Budget | None = None) -> DeduceResult:
    """Run the saturation search; returns proved/contradiction/unknown."""
    return _Engine(problem, budget or Budget()).run()


# ---------------------------------------------------------------------------
# Problems from codes
# ---------------------------------------------------------------------------

def _pauli_factors(word: PauliWord) -> tuple[tuple[int, str, int], ...]:
    if word.phase != 0:
        raise ProblemError("operator words must be phase-free")
    factors = []
    for k in range(word.n):
        if word.x_exp[k]:
            factors.append((k + 1, "X", word.x_exp[k]))
        if word.z_exp[k]:
            factors.append((k + 1, "Z", word.z_exp[k]))
    return tuple(factors)


def problem_for_code(code: StabilizerCode,
                     pair_sites: Iterable[int] | None = None,
                     extras: bool = True) -> Problem:
    """Deduction problem for a code's operator list (preset extras included)."""
    from .compile import PRESET_EXTRAS

    ops = [_pauli_factors(g) for g in code.generators]
    if extras:
        for _label, word in PRESET_EXTRAS.get(code.name, ()):
            ops.append(tuple((site, sym, 1) for site, sym in word))
    subset = code.pair_sites if pair_sites is None else frozenset(pair_sites)
    return Problem(n=code.n, q=code.q, pair_sites=subset,
                   operators=tuple(ops), name=code.name)


@dataclass
class SubsetResult:
    subset: tuple[int, ...]
    status: str
    transcript: Transcript


def search_subsets(code: StabilizerCode, budget: Budget | None = None,
                   extras: bool = True, exhaustive_limit: int = 12,
                   subset_sizes: Sequence[int] | None = None) -> list[SubsetResult]:
    """Try every pair-site subset in size-then-lexicographic order."""
    if code.n > exhaustive_limit:
        raise ProblemError(
            f"exhaustive subset scan refused for n = {code.n} > {exhaustive_limit}")
    sizes = subset_sizes if subset_sizes is not None else range(code.n + 1)
    results = []
    for size in sizes:
        for subset in itertools.combinations(range(1, code.n + 1), size):
            problem = problem_for_code(code, pair_sites=subset, extras=extras)
            res = deduce(problem, budget)
            results.append(SubsetResult(subset, res.status, res.transcript))
    return results
