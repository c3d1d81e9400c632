"""Admissible exponent tuples (n, p0, q0, p, q, alpha) and conjugates."""
from __future__ import annotations

import math
from dataclasses import dataclass

INF = math.inf
_REL_TOL = 1e-12


class ExponentError(ValueError):
    """An exponent tuple violates one of its admissibility constraints."""


def conjugate(x: float) -> float:
    """Hoelder conjugate with 1' = inf and inf' = 1."""
    if x == 1:
        return INF
    if x == INF:
        return 1.0
    if x < 1:
        raise ExponentError(f"conjugate undefined for {x} < 1")
    return x / (x - 1.0)


def alpha_for(n: int, p: float, q: float, q0: float) -> float:
    """The alpha solving 1/p - 1/q = alpha / (n * q0')."""
    return (1.0 / p - 1.0 / q) * n * conjugate(q0)


@dataclass(frozen=True)
class ExponentTuple:
    """Exponents of one theorem instance; validated on construction.

    Constraints: 1 <= p0 <= p <= q < q0 <= inf,
    1/p - 1/q = alpha/(n q0') with 0 <= alpha < n, and
    1/p0 - 1/q0 > alpha/(n q0').
    """

    n: int
    p0: float
    q0: float
    p: float
    q: float
    alpha: float

    def __post_init__(self):
        n, p0, q0, p, q, alpha = (self.n, self.p0, self.q0, self.p, self.q, self.alpha)
        if n < 1:
            raise ExponentError(f"violated n >= 1: n={n}")
        if not 1 <= p0 <= p:
            raise ExponentError(f"violated 1 <= p0 <= p: p0={p0}, p={p}")
        if not p <= q:
            raise ExponentError(f"violated p <= q: p={p}, q={q}")
        if not q < q0:
            raise ExponentError(f"violated q < q0: q={q}, q0={q0}")
        if not 0 <= alpha < n:
            raise ExponentError(f"violated 0 <= alpha < n: alpha={alpha}, n={n}")
        lhs = 1.0 / p - 1.0 / q
        rhs = alpha / (n * conjugate(q0))
        if not math.isclose(lhs, rhs, rel_tol=_REL_TOL, abs_tol=_REL_TOL):
            raise ExponentError(
                f"violated 1/p - 1/q = alpha/(n q0'): {lhs} != {rhs}")
        if not 1.0 / p0 - (0.0 if q0 == INF else 1.0 / q0) > alpha / (n * conjugate(q0)) - _REL_TOL:
            raise ExponentError(
                f"violated 1/p0 - 1/q0 > alpha/(n q0'): p0={p0}, q0={q0}, alpha={alpha}")

    @property
    def q0_prime(self) -> float:
        return conjugate(self.q0)

    @property
    def p_prime(self) -> float:
        return conjugate(self.p)

    @property
    def q_prime(self) -> float:
        return conjugate(self.q)

    @classmethod
    def make(cls, n: int, p0: float, q0: float, p: float, q: float) -> "ExponentTuple":
        """Construct with alpha derived from the scaling relation."""
        return cls(n, p0, q0, p, q, alpha_for(n, p, q, q0))

    def to_config(self) -> dict:
        return {"n": self.n, "p0": self.p0,
                "q0": "inf" if self.q0 == INF else self.q0,
                "p": self.p, "q": self.q, "alpha": self.alpha}

    @classmethod
    def from_config(cls, cfg: dict) -> "ExponentTuple":
        q0 = cfg["q0"]
        q0 = INF if q0 in ("inf", "Infinity", None) else float(q0)
        return cls(int(cfg["n"]), float(cfg["p0"]), q0,
                   float(cfg["p"]), float(cfg["q"]), float(cfg["alpha"]))
