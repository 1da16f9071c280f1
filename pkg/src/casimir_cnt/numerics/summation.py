"""Primed Matsubara summation with tail-based truncation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..constants import C, HBAR, KB
from .quadrature import ConvergenceError


@dataclass(frozen=True)
class MatsubaraSpec:
    temperature: float
    max_terms: int = 400_000
    tail_tolerance: float = 1e-8
    prime_rule: bool = True

    def __post_init__(self):
        if not self.temperature >= 0:
            raise ValueError("temperature must be >= 0 K")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not self.prime_rule:
            raise ValueError("Lifshitz sums always halve the n = 0 term")

    def xi(self, n):
        """Matsubara frequency xi_n in rad/s."""
        return 2.0 * math.pi * KB * self.temperature / HBAR * np.asarray(n, dtype=float)

    def kappa(self, n):
        """Matsubara wavenumber kappa_n = xi_n / c in 1/m."""
        return self.xi(n) / C


@dataclass
class SumResult:
    value: float | np.ndarray
    n_terms: int


def matsubara_sum(term, spec: MatsubaraSpec, vectorized=False, block=16, max_block=512,
                  min_index=0, full_output=False):
    """k_B T [term(0)/2 + sum_{n>=1} term(n)].

    Terms may be scalars or arrays (all components are summed together).  The
    sum stops at the first n >= ``min_index`` whose geometric tail estimate
    ``|t_n| r / (1 - r)``, with ``r = |t_n / t_{n-1}|``, falls below
    ``tail_tolerance * |partial sum|`` in every component.  Three successive
    non-decreasing terms beyond ``min_index`` raise ConvergenceError, as does
    running out of ``max_terms``.

    With ``vectorized`` the callable receives consecutive integer arrays,
    starting with ``block`` indices and doubling up to ``max_block``, and
    returns one row per index.
    """
    sizes = {"next": block}

    if vectorized:
        def fetch(start):
            size = sizes["next"]
            sizes["next"] = min(2 * size, max_block)
            ns = np.arange(start, min(start + size, spec.max_terms))
            return np.asarray(term(ns), dtype=float)
    else:
        def fetch(start):
            return np.asarray([term(int(start))], dtype=float)

    total = None
    prev = None
    rising = 0
    n = 0
    while n < spec.max_terms:
        chunk = fetch(n)
        for row in chunk:
            row = np.asarray(row, dtype=float)
            mag = np.abs(row)
            if total is None:
                total = 0.5 * row
                prev = mag
                n += 1
                continue
            total = total + row
            if n >= min_index:
                with np.errstate(divide="ignore", invalid="ignore"):
                    ratio = np.where(prev > 0, mag / prev, 0.0)
                    tail = np.where(ratio < 1.0, mag * ratio / (1.0 - ratio), np.inf)
                tail = np.where(mag == 0.0, 0.0, tail)
                if np.all(tail <= spec.tail_tolerance * np.abs(total)):
                    value = KB * spec.temperature * total
                    value = float(value) if value.ndim == 0 else value
                    return SumResult(value, n + 1) if full_output else value
                grew = np.any((mag >= prev) & (prev > 0))
                rising = rising + 1 if grew else 0
                if rising >= 3:
                    raise ConvergenceError(
                        f"Matsubara terms stopped decaying near n = {n}",
                        estimate=KB * spec.temperature * total,
                    )
            prev = mag
            n += 1
    raise ConvergenceError(
        f"Matsubara sum not converged after {spec.max_terms} terms",
        estimate=None if total is None else KB * spec.temperature * total,
    )
