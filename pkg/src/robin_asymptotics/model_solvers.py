"""Exact principal Robin eigenvalues of separable model domains."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

from .errors import DomainError
from .special_functions import ball_lambda_root, mu_tanh_root

VARIANTS = ("interval-halfline", "ball", "parallelepiped", "planar-angle",
            "cone-with-halfspace")


@dataclass(frozen=True)
class ModelDomain:
    """A model domain.

    ``m`` is the ball dimension, ``half_sides`` the half-side lengths of a
    parallelepiped ``{|x_j| < l_j}`` and ``alpha`` the half-angle of the
    planar angle ``{|arg z| < alpha}``.
    """

    variant: str
    m: int = 1
    half_sides: Tuple[float, ...] = ()
    alpha: float = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown model domain {self.variant!r}")
        if self.variant == "ball" and (self.m < 1 or int(self.m) != self.m):
            raise DomainError("ball dimension must be a positive integer")
        if self.variant == "parallelepiped":
            if not self.half_sides or any(not l > 0 for l in self.half_sides):
                raise DomainError("parallelepiped half-sides must be positive")
            object.__setattr__(self, "half_sides", tuple(float(l) for l in self.half_sides))
        if self.variant == "planar-angle":
            if self.alpha is None or not 0 < self.alpha < math.pi:
                raise DomainError("planar angle needs alpha in (0, pi)")

    @classmethod
    def halfline(cls):
        return cls("interval-halfline")

    @classmethod
    def ball(cls, m):
        return cls("ball", m=m)

    @classmethod
    def box(cls, *half_sides):
        return cls("parallelepiped", m=len(half_sides), half_sides=tuple(half_sides))

    @classmethod
    def angle(cls, alpha):
        return cls("planar-angle", alpha=alpha)

    @classmethod
    def halfspace_cone(cls):
        return cls("cone-with-halfspace")


def model_lambda(domain, gamma):
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    v = domain.variant
    if v in ("interval-halfline", "cone-with-halfspace"):
        return -gamma * gamma
    if v == "ball":
        return ball_lambda_root(domain.m, gamma)
    if v == "parallelepiped":
        total = 0.0
        for l in domain.half_sides:
            mu = mu_tanh_root(gamma * l).root
            total += (mu / l) ** 2
        return -total
    # planar angle
    if domain.alpha < 0.5 * math.pi:
        return -(gamma / math.sin(domain.alpha)) ** 2
    return -gamma * gamma


def cone_rescale(lambda_at_one, gamma):
    """Bottom of the spectrum of a cone at parameter ``gamma`` from its value at 1."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    return gamma * gamma * lambda_at_one


def cusp_upper_exponent(p):
    """Growth exponent ``N`` in ``Lambda <= -const gamma^N`` for the cusp ``|y| < x^p``.

    Returns ``inf`` for ``p >= 2``, where every exponent is attained.
    """
    if not p > 1:
        raise DomainError(f"cusp exponent must exceed 1, got {p}")
    if p >= 2:
        return math.inf
    return 2.0 / (2.0 - p)
