"""First-principles oracle for the n-detector correlation of two sources.

Each detector j sees the instantaneous intensity

    I_j = Ia + Ib + 2 sqrt(Ia Ib) cos(theta + delta_j),

the interference of two fields with equal mean intensity, independent
intensity fluctuations, and a common fluctuating relative phase theta.
Writing the cosine as half a sum of two complex exponentials, the product
I_1 ... I_n expands into exactly 4^n terms, each assigning one token out of
{A, B, +, -} to every detector.  Averaging over uniform theta kills every
assignment whose + and - counts differ; a surviving assignment with a
detectors on A, b on B and m on each of +/- contributes

    g(a + m) g(b + m) exp(i [sum_plus delta_j - sum_minus delta_j]) / 2^n

to the normalized correlation, where g(k) is the k-th normalized intensity
moment of one source (the mean intensity cancels).  The imaginary parts
cancel in conjugate pairs.  This evaluator is exhaustive and independent of
the closed forms in :mod:`icfsim.analytic`, which it certifies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .analytic import PhaseConfig, g2_point, g3_point, g4_point
from .constants import DEFAULT_SEED
from .errors import OrderTooLarge, UnsupportedOrder
from .sources import SourceModel, coherence_envelope, moment

# 4^n assignments; n = 8 is 65536, still instant, and nobody needs more.
MAX_ORDER = 8

_A, _B, _PLUS, _MINUS = range(4)


@dataclass(frozen=True)
class ExpansionTerm:
    """One theta-surviving token assignment.

    ``a_count``/``b_count`` detectors take the bare source intensities;
    ``plus_set``/``minus_set`` are the (equal-size) detector index sets
    carrying e^{+i(theta+delta)} and e^{-i(theta+delta)} tokens.  ``weight``
    is the term's multiplicative factor in the normalized sum, 2^-n.
    """

    a_count: int
    b_count: int
    plus_set: frozenset
    minus_set: frozenset
    weight: float


@lru_cache(maxsize=None)
def _enumerate(n: int):
    """Enumerate all token assignments once; keep the theta-balanced ones."""
    if not 1 <= n <= MAX_ORDER:
        raise OrderTooLarge(n, MAX_ORDER)
    terms = []
    visited = 0
    for tokens in itertools.product((_A, _B, _PLUS, _MINUS), repeat=n):
        visited += 1
        plus = frozenset(j for j, t in enumerate(tokens) if t == _PLUS)
        minus = frozenset(j for j, t in enumerate(tokens) if t == _MINUS)
        if len(plus) != len(minus):
            continue
        terms.append(ExpansionTerm(
            a_count=tokens.count(_A),
            b_count=tokens.count(_B),
            plus_set=plus,
            minus_set=minus,
            weight=2.0 ** -n,
        ))
    return terms, visited


def expansion_terms(n: int) -> list[ExpansionTerm]:
    """All theta-surviving assignments for order n, in enumeration order."""
    return list(_enumerate(n)[0])


def assignments_enumerated(n: int) -> int:
    """Raw assignments actually visited by the expansion (4^n of them)."""
    return _enumerate(n)[1]


def term_count(n: int) -> int:
    """Number of assignments that survive the theta average."""
    return len(_enumerate(n)[0])


@lru_cache(maxsize=None)
def _table(n: int):
    """Vectorized term table: moment orders (k_a, k_b) and sign rows.

    ``signs[t, j]`` is +1/-1/0 for a +/-/bare token at detector j of term t.
    """
    terms, _ = _enumerate(n)
    k_a = np.empty(len(terms), dtype=np.intp)
    k_b = np.empty(len(terms), dtype=np.intp)
    signs = np.zeros((len(terms), n), dtype=np.int8)
    for t, term in enumerate(terms):
        m = len(term.plus_set)
        k_a[t] = term.a_count + m
        k_b[t] = term.b_count + m
        for j in term.plus_set:
            signs[t, j] = 1
        for j in term.minus_set:
            signs[t, j] = -1
    return k_a, k_b, signs


def _icf_sum(model: SourceModel, delta: np.ndarray) -> complex:
    """Unnormalized complex expansion sum; imaginary part must cancel."""
    n = delta.size
    k_a, k_b, signs = _table(n)
    g = np.array([moment(model, k) if k >= 1 else 1.0 for k in range(n + 1)])
    w = g[k_a] * g[k_b]
    env = coherence_envelope(model, delta)
    if model.coherence_width is not None:
        w = w * np.prod(np.where(signs != 0, env[None, :], 1.0), axis=1)
    phases = signs @ delta
    return complex(np.sum(w * np.exp(1j * phases)))


def icf_general(model: SourceModel, delta) -> float:
    """Normalized n-detector correlation <prod I_j> / prod <I_j>.

    ``delta`` is the per-detector phase-offset list; n = len(delta) up to 8.
    """
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    n = delta.size
    if not 1 <= n <= MAX_ORDER:
        raise OrderTooLarge(n, MAX_ORDER)
    total = _icf_sum(model, delta)
    scale = 2.0 ** -n
    value = total.real * scale
    residue = abs(total.imag) * scale
    if residue > 1e-12 * max(1.0, abs(value)):
        raise ArithmeticError(
            f"imaginary residue {residue:g} did not cancel for order {n}")
    return value


def verify_closed_form(order: int, trials: int, seed: int | None = None) -> float:
    """Max |expansion - closed form| over random valid moments and phases.

    Each trial draws moments satisfying the classicality inequalities
    (g2 >= 1, g3 >= g2^2, g4 g2 >= g3^2) and a uniform phase tuple, then
    compares this module's exhaustive evaluation against the closed form of
    the same order.  Agreement below 1e-10 certifies the closed form.
    """
    if order not in (2, 3, 4):
        raise UnsupportedOrder(order)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
    worst = 0.0
    for _ in range(trials):
        g2 = rng.uniform(1.0, 4.0)
        g3 = g2 * g2 * rng.uniform(1.0, 2.5)
        g4 = (g3 * g3 / g2) * rng.uniform(1.0, 2.5)
        model = SourceModel.custom({2: g2, 3: g3, 4: g4})
        delta = rng.uniform(0.0, 2.0 * np.pi, order)
        if order == 2:
            closed = g2_point(model, delta[0] - delta[1])
        elif order == 3:
            closed = g3_point(model, PhaseConfig(tuple(delta)))
        else:
            closed = g4_point(model, PhaseConfig(tuple(delta)))
        worst = max(worst, abs(icf_general(model, delta) - closed))
    return worst
