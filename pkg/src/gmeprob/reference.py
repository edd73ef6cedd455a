"""Closed-form detection probabilities used as targets for the Monte Carlo estimates."""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sin, sqrt

from scipy.integrate import quad


def _sin2(t: float) -> float:
    return sin(t) ** 2


def _ellipk(m: float) -> float:
    return quad(lambda t: 1.0 / sqrt(1.0 - m * _sin2(t)), 0.0, pi / 2)[0]


def _ellippi(nu: float, m: float) -> float:
    return quad(lambda t: 1.0 / ((1.0 - nu * _sin2(t)) * sqrt(1.0 - m * _sin2(t))), 0.0, pi / 2)[0]


def ghz3_symmetric_q0() -> float:
    """GHZ_3 under U^(x)3, Q_0 in one basis.

    The second elliptic argument enters as the parameter m (integrand
    ``1 - m sin^2``), which is the reading that reproduces 0.52966.
    """
    k = _ellipk(-1 / 8)
    p = _ellippi(-1 / 2, -1 / 8)
    return 1 + 3 * sqrt(2) * (2 * k - 3 * p) / (2 * pi)


def w_symmetric_q1(n: int) -> float:
    """W_n under U^(x)n, Q_1 in one basis."""
    if n < 3:
        raise ValueError("formula holds for n >= 3")
    return (1 + sqrt((n - 1) / (n - 2)) - 2 * sqrt((n - 1) / n)) / n


def w_symmetric_q0(n: int) -> float:
    if n < 3:
        raise ValueError("formula holds for n >= 3")
    return 1 / sqrt(3) if n == 3 else 0.0


DICKE42_SYMMETRIC = {
    "q0": 1 / sqrt(3 + sqrt(6)),
    "q1": (sqrt(2) - 1) / 2,
    "q2": 1 - sqrt(8 - 2 * sqrt(3)) / 3,
    "q0,q1,q2": (3 + 3 * sqrt(2) + 2 * sqrt(3 * (3 - sqrt(6))) - 2 * sqrt(4 + sqrt(13))) / 6,
}


@dataclass(frozen=True)
class Target:
    state: str
    group: str
    criteria: str
    bases: str
    closed_form: str
    value: float


def reference_targets() -> list[Target]:
    rows = [
        Target("ghz3", "symmetric", "q0", "comp",
               "1 + 3*sqrt(2)*(2K(-1/8) - 3Pi(-1/2,-1/8))/(2*pi)", ghz3_symmetric_q0()),
    ]
    for n in range(3, 7):
        rows.append(Target(f"w{n}", "symmetric", "q1", "comp",
                           f"(1 + sqrt({n - 1}/{n - 2}) - 2*sqrt({n - 1}/{n}))/{n}", w_symmetric_q1(n)))
    rows.append(Target("w3", "symmetric", "q0", "comp", "1/sqrt(3)", w_symmetric_q0(3)))
    for n in (4, 5):
        rows.append(Target(f"w{n}", "symmetric", "q0", "comp", "0", 0.0))
    forms = {
        "q0": "1/sqrt(3+sqrt(6))",
        "q1": "(sqrt(2)-1)/2",
        "q2": "1 - sqrt(8-2*sqrt(3))/3",
        "q0,q1,q2": "(3 + 3*sqrt(2) + 2*sqrt(3*(3-sqrt(6))) - 2*sqrt(4+sqrt(13)))/6",
    }
    for crit, value in DICKE42_SYMMETRIC.items():
        rows.append(Target("dicke4,2", "symmetric", crit, "comp", forms[crit], value))
    return rows
