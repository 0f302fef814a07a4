"""Single-particle spectrum of the 3-dimensional deformed oscillator.

Energies in units of hbar*omega0:

    E(n, l) = [n] q^(n+1) - q tanh(tau) [l][l+1],        q = e^tau

where [x] is the real-kind q-bracket and [l][l+1] is the angular-momentum
Casimir eigenvalue.  The coefficient of the Casimir term is written
q (q - q^-1) / [2] in operator form; since q - q^-1 = 2 sinh(tau) and
[2] = 2 cosh(tau), it collapses to q tanh(tau).

A shell n splits into levels l = n, n-2, ..., 1 or 0, each holding
2(2l+1) particles.  The small-tau expansion (energy_taylor) and the
modified-oscillator comparator (nilsson_energy) are provided alongside
the exact formula.
"""

import math
from dataclasses import dataclass

from .qmath import DeformationKind, DeformationParameter, q_bracket

__all__ = [
    "Level",
    "ModelParameters",
    "InvalidLevelError",
    "allowed_l",
    "casimir_eigenvalue",
    "energy",
    "energy_taylor",
    "nilsson_energy",
    "mean_L2",
    "enumerate_levels",
]


class InvalidLevelError(ValueError):
    """(n, l) outside the branching rule l = n, n-2, ..., 1 or 0."""


def _check_branching(n: int, l: int) -> None:
    if n < 0 or l < 0 or l > n or (n - l) % 2 != 0:
        raise InvalidLevelError(
            f"(n={n}, l={l}) violates the branching rule l = n, n-2, ..., 1 or 0"
        )


@dataclass(frozen=True)
class Level:
    """One (n, l) eigenstate: energy in hbar*omega0 units, capacity 2(2l+1)."""

    n: int
    l: int
    energy: float
    degeneracy: int

    def __post_init__(self) -> None:
        _check_branching(self.n, self.l)
        if self.degeneracy != 2 * (2 * self.l + 1):
            raise ValueError(
                f"degeneracy {self.degeneracy} != 2(2l+1) = {2 * (2 * self.l + 1)}"
            )


@dataclass(frozen=True)
class ModelParameters:
    deformation: DeformationParameter
    hbar_omega0: float = 1.0
    n_max: int = 24

    def __post_init__(self) -> None:
        if not (math.isfinite(self.hbar_omega0) and self.hbar_omega0 > 0):
            raise ValueError(f"hbar_omega0 must be positive, got {self.hbar_omega0!r}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max!r}")


def allowed_l(n: int) -> list[int]:
    """Angular momenta of shell n, descending: n, n-2, ..., 1 or 0."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n!r}")
    return list(range(n, -1, -2))


def casimir_eigenvalue(l: int, d: DeformationParameter) -> float:
    """Angular-momentum Casimir eigenvalue [l][l+1]."""
    if l < 0:
        raise ValueError(f"l must be >= 0, got {l!r}")
    return q_bracket(l, d) * q_bracket(l + 1, d)


def _require_real(d: DeformationParameter, what: str) -> None:
    if d.kind is not DeformationKind.REAL:
        raise ValueError(f"{what} is defined for the REAL deformation kind only")


def energy(n: int, l: int, p: ModelParameters) -> float:
    """Exact eigenvalue E(n, l) for real deformation, in hbar*omega0 units.

    At tau = 0 this returns hbar_omega0 * n exactly, with no division.
    """
    _check_branching(n, l)
    d = p.deformation
    _require_real(d, "energy")
    tau = d.tau
    if tau == 0.0:
        return p.hbar_omega0 * n
    q = math.exp(tau)
    return p.hbar_omega0 * (
        q_bracket(n, d) * q ** (n + 1)
        - q * math.tanh(tau) * casimir_eigenvalue(l, d)
    )


def energy_taylor(n: int, l: int, p: ModelParameters, order: int) -> float:
    """Small-tau polynomial approximation of energy(), order 1 or 2.

    order 1:  n - tau (l(l+1) - n(n+1))
    order 2:  additionally  - tau^2 (l(l+1) - n(n+1)(2n+1)/3)

    all times hbar_omega0.  The remainder is O(tau^3) in general, but the
    tau^3 coefficient is (n^2(n+1)^2 - l^2(l+1)^2)/3, which vanishes on
    the stretched levels l = n, leaving an O(tau^4) remainder there.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    _check_branching(n, l)
    _require_real(p.deformation, "energy_taylor")
    tau = p.deformation.tau
    value = n - tau * (l * (l + 1) - n * (n + 1))
    if order == 2:
        # n(n+1)(2n+1) is six times a square pyramidal number, so the
        # division by 3 is exact in integers.
        value -= tau * tau * (l * (l + 1) - n * (n + 1) * (2 * n + 1) // 3)
    return p.hbar_omega0 * value


def mean_L2(N: int) -> int:
    """Shell average of L^2 in shell N: N(N+3)/2, always an integer."""
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N!r}")
    return N * (N + 3) // 2


def nilsson_energy(n: int, l: int, kappa_prime: float, hbar_omega: float = 1.0) -> float:
    """Modified-oscillator comparator level energy.

    E = hbar_omega (n + 3/2) - hbar_omega kappa' (l(l+1) - <L^2>_n),
    the diagonal eigenvalue of the oscillator plus the flattening term,
    with the shell index of <L^2> identified with n.
    """
    _check_branching(n, l)
    if not (math.isfinite(hbar_omega) and hbar_omega > 0):
        raise ValueError(f"hbar_omega must be positive, got {hbar_omega!r}")
    return hbar_omega * (n + 1.5) - hbar_omega * kappa_prime * (l * (l + 1) - mean_L2(n))


def enumerate_levels(p: ModelParameters) -> list[Level]:
    """All levels with 0 <= n <= n_max, in (n, descending l) enumeration order.

    Shell n contributes floor(n/2) + 1 levels totalling (n+1)(n+2) particles.
    """
    levels = []
    for n in range(p.n_max + 1):
        for l in allowed_l(n):
            levels.append(Level(n, l, energy(n, l, p), 2 * (2 * l + 1)))
    return levels
