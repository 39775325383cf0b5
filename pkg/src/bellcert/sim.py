"""Finite-shot simulation of the verifier/prover rounds.

A strategy is a shared state plus two single-qubit observables per site.
Each round the verifier picks one setting per site, the provers return
+-1 outcomes drawn by the Born rule, and correlation estimates aggregate
the outcome products.  Sampling is trajectory-based: optional local
depolarizing noise applies an explicit random Pauli per site before the
measurements, keeping the estimator unbiased at 2^n amplitudes of memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .pauli import StabilizerCode
from .poly import BellPolynomial, MeasurementAssignment, Monomial
from .verify import Realization, canonical_realization, logical_basis

_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class EstimationError(ValueError):
    """Raised when a polynomial cannot be estimated from single-shot rounds."""


@dataclass
class Strategy:
    """Shared n-qubit state, a realization, and the RNG seed."""

    state: np.ndarray
    realization: Realization
    seed: int = 0

    def __post_init__(self):
        self.state = np.asarray(self.state, dtype=complex).reshape(-1)
        n = self.realization.n
        if self.state.shape[0] != 2**n:
            raise ValueError(f"state dimension {self.state.shape[0]} != 2^{n}")
        for site in range(1, n + 1):
            if self.realization.dim(site) != 2:
                raise ValueError("sampling requires dimension-2 sites")
        norm = np.linalg.norm(self.state)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm {norm} != 1")
        self._rng = np.random.default_rng(self.seed)

    @property
    def n(self) -> int:
        return self.realization.n

    @classmethod
    def from_code(cls, code: StabilizerCode, theta: float = 0.0,
                  asg: MeasurementAssignment | None = None,
                  seed: int = 0) -> "Strategy":
        """Tilted codeword cos(theta)|0L> + sin(theta)|1L> with the
        canonical realization for the code's pair sites."""
        v0, v1 = logical_basis(code)
        state = math.cos(theta) * v0 + math.sin(theta) * v1
        asg = asg or MeasurementAssignment.build(code.n, code.pair_sites)
        return cls(state=state, realization=canonical_realization(asg), seed=seed)


def _site_eigs(real: Realization) -> list[tuple[tuple[np.ndarray, np.ndarray],
                                                tuple[np.ndarray, np.ndarray]]]:
    """Per site and setting: (eigenvalues ascending, eigenvector columns)."""
    out = []
    for site in range(1, real.n + 1):
        pair = []
        for setting in (0, 1):
            vals, vecs = np.linalg.eigh(real.obs(site, setting))
            pair.append((vals.real, vecs))
        out.append(tuple(pair))
    return out


def sample_round(strategy: Strategy, settings: Mapping[int, int],
                 rng: np.random.Generator | None = None) -> dict[int, int]:
    """One verifier round: sequential projective measurement with collapse.

    Settings must cover every site; outcomes are +-1 per site.  The joint
    distribution equals the spectral measure of the commuting product
    observables, which the batched estimator reproduces.
    """
    n = strategy.n
    if set(settings) != set(range(1, n + 1)):
        raise ValueError("settings must cover every site exactly once")
    rng = rng if rng is not None else strategy._rng
    eigs = _site_eigs(strategy.realization)
    psi = strategy.state.reshape((2,) * n)
    outcomes = {}
    for site in range(1, n + 1):
        vals, vecs = eigs[site - 1][settings[site]]
        # rotate site axis into the observable eigenbasis
        psi = np.moveaxis(np.tensordot(vecs.conj().T, psi, axes=([1], [site - 1])),
                          0, site - 1)
        amp = np.moveaxis(psi, site - 1, 0).reshape(2, -1)
        p_hi = float(np.sum(np.abs(amp[1])**2))
        pick = 1 if rng.random() < p_hi else 0
        outcomes[site] = int(round(vals[pick]))
        collapsed = np.zeros_like(amp)
        collapsed[pick] = amp[pick]
        collapsed /= math.sqrt(p_hi if pick else 1.0 - p_hi)
        psi = np.moveaxis(collapsed.reshape((2,) + psi.shape[:site - 1]
                                            + psi.shape[site:]), 0, site - 1)
        # rotate back so later sites measure in the original frame
        psi = np.moveaxis(np.tensordot(vecs, psi, axes=([1], [site - 1])),
                          0, site - 1)
    return outcomes


@dataclass
class EstimateReport:
    estimate: float
    stderr: float
    shots: int
    per_setting: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "shots": self.shots,
            "per_setting": self.per_setting,
        }


def _check_single_measurement(poly: BellPolynomial) -> list[tuple[Monomial, float]]:
    terms = []
    offenders = []
    for mono, coeff in poly.terms():
        if any(len(word) > 1 for _, word in mono.factors):
            offenders.append(str(mono))
        else:
            terms.append((mono, coeff))
    if offenders:
        raise EstimationError(
            "sequential monomials unsupported (one observable per site and "
            "round): " + "; ".join(offenders))
    return terms


def _allocate(weights: Sequence[float], shots: int) -> list[int]:
    total = sum(weights)
    raw = [shots * w / total for w in weights]
    alloc = [max(1, int(r)) for r in raw]
    remainder = shots - sum(alloc)
    if remainder > 0:
        order = sorted(range(len(raw)), key=lambda i: raw[i] - int(raw[i]),
                       reverse=True)
        for i in range(remainder):
            alloc[order[i % len(order)]] += 1
    return alloc


def _sample_products(state: np.ndarray, eigs, sites: tuple[int, ...],
                     settings: tuple[int, ...], shots: int,
                     rng: np.random.Generator, noise_p: float,
                     n: int) -> np.ndarray:
    """Outcome products for `shots` rounds of one setting pattern."""
    if noise_p > 0:
        site_ps = np.array([1.0 - 3.0 * noise_p / 4.0] + [noise_p / 4.0] * 3)
        patterns = rng.choice(4, size=(shots, n), p=site_ps).astype(np.uint8)
        uniq, counts = np.unique(patterns, axis=0, return_counts=True)
        chunks = []
        for pattern, count in zip(uniq, counts):
            noisy = state.reshape((2,) * n)
            for k, g in enumerate(pattern):
                if g:
                    noisy = np.moveaxis(
                        np.tensordot(_PAULIS[g], noisy, axes=([1], [k])), 0, k)
            chunks.append(_sample_products(noisy.reshape(-1), eigs, sites,
                                           settings, int(count), rng, 0.0, n))
        return np.concatenate(chunks) if chunks else np.zeros(0)
    full_settings = [0] * n
    for site, setting in zip(sites, settings):
        full_settings[site - 1] = setting
    psi = state.reshape((2,) * n)
    outcome_vals = []
    for k in range(n):
        vals, vecs = eigs[k][full_settings[k]]
        psi = np.moveaxis(np.tensordot(vecs.conj().T, psi, axes=([1], [k])), 0, k)
        outcome_vals.append(vals)
    probs = np.abs(psi.reshape(-1))**2
    probs = probs / probs.sum()
    idx = rng.choice(probs.size, size=shots, p=probs)
    products = np.ones(shots)
    for site in sites:
        bit = (idx >> (n - site)) & 1
        products *= outcome_vals[site - 1][bit]
    return products


def estimate_bell(strategy: Strategy, poly: BellPolynomial, shots: int,
                  allocation: str = "coeff",
                  noise_p: float = 0.0) -> EstimateReport:
    """Unbiased finite-shot estimate of a Bell polynomial's expectation.

    Shots are split across monomials proportionally to |coefficient|
    (minimum one each); ``allocation='uniform'`` splits evenly.  Each
    monomial gets an independent seeded stream, so reports are
    reproducible for any execution order.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if not 0.0 <= noise_p <= 1.0:
        raise ValueError(f"noise probability {noise_p} outside [0, 1]")
    terms = _check_single_measurement(poly)
    constant = 0.0
    sampled: list[tuple[Monomial, float]] = []
    for mono, coeff in terms:
        if mono.is_identity:
            constant += coeff
        else:
            sampled.append((mono, coeff))
    if not sampled:
        return EstimateReport(constant, 0.0, 0, [])
    if allocation == "coeff":
        weights = [abs(c) for _, c in sampled]
    elif allocation == "uniform":
        weights = [1.0] * len(sampled)
    else:
        raise ValueError(f"unknown allocation {allocation!r}")
    alloc = _allocate(weights, shots)
    eigs = _site_eigs(strategy.realization)
    seeds = np.random.SeedSequence(strategy.seed).spawn(len(sampled))
    estimate = constant
    variance = 0.0
    per_setting = []
    for (mono, coeff), m, seed in zip(sampled, alloc, seeds):
        rng = np.random.default_rng(seed)
        sites = tuple(s for s, _ in mono.factors)
        settings = tuple(word[0] for _, word in mono.factors)
        products = _sample_products(strategy.state, eigs, sites, settings,
                                    m, rng, noise_p, strategy.n)
        mean = float(products.mean())
        var = float(products.var(ddof=1)) if m > 1 else 0.0
        estimate += coeff * mean
        variance += coeff * coeff * var / m
        per_setting.append({
            "sites": list(sites),
            "settings": list(settings),
            "coeff": coeff,
            "shots": int(m),
            "mean": mean,
        })
    return EstimateReport(float(estimate), math.sqrt(variance),
                          int(sum(alloc)), per_setting)


@dataclass
class SweepPoint:
    p: float
    shots: int
    estimate: float
    stderr: float

    def to_json(self) -> dict:
        return {"p": self.p, "shots": self.shots,
                "estimate": self.estimate, "stderr": self.stderr}


def noise_sweep(strategy: Strategy, poly: BellPolynomial,
                p_grid: Iterable[float], shots: int,
                allocation: str = "coeff") -> list[SweepPoint]:
    """Estimate under per-site depolarizing noise for each p in the grid.

    Every row reuses the strategy seed, so the p = 0 row coincides with
    estimate_bell exactly.
    """
    rows = []
    for p in p_grid:
        report = estimate_bell(strategy, poly, shots, allocation=allocation,
                               noise_p=float(p))
        rows.append(SweepPoint(float(p), report.shots, report.estimate,
                               report.stderr))
    return rows


def sweep_csv(rows: Iterable[SweepPoint]) -> str:
    lines = ["p,shots,estimate,stderr"]
    for row in rows:
        lines.append(f"{row.p:.6g},{row.shots},{row.estimate:.10g},"
                     f"{row.stderr:.10g}")
    return "\n".join(lines) + "\n"
