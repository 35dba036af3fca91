"""Unit systems.

A unit system is fixed by three constants: hbar, the vacuum permittivity
eps0 and the vacuum permeability mu0. Light speed and vacuum impedance
are derived in the constructor and stored, so c = 1/sqrt(eps0*mu0) and
Z0 = sqrt(mu0/eps0) hold exactly (bit for bit) on every instance.

Everything in the library defaults to natural units (all ones); SI enters
only at call boundaries by passing units=si().
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Units:
    hbar: float
    eps0: float
    mu0: float
    c: float = field(init=False)
    Z0: float = field(init=False)

    def __post_init__(self):
        if self.hbar <= 0 or self.eps0 <= 0 or self.mu0 <= 0:
            raise ValueError("unit constants must be positive")
        object.__setattr__(self, "c", 1.0 / math.sqrt(self.eps0 * self.mu0))
        object.__setattr__(self, "Z0", math.sqrt(self.mu0 / self.eps0))


def natural() -> Units:
    """hbar = eps0 = mu0 = 1, hence c = Z0 = 1."""
    return Units(hbar=1.0, eps0=1.0, mu0=1.0)


def si() -> Units:
    """2019 SI values (exact hbar, CODATA-2018 vacuum constants)."""
    return Units(hbar=1.054571817e-34,
                 eps0=8.8541878128e-12,
                 mu0=1.25663706212e-6)


NATURAL = natural()
