"""Chained collection-efficiency budget."""

from __future__ import annotations

from dataclasses import dataclass

from .common import ExperimentError


def _check(name, x):
    if x is None:
        return None
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ExperimentError(f"{name} must lie in [0, 1], got {x}")
    return x


@dataclass(frozen=True)
class EfficiencyBudget:
    """Emitter-to-lens efficiency chain.

    Derived products are properties, so they can never go stale. Missing
    stages (``None``) leave the products that need them undefined.
    """

    beta: float
    taper: float
    grating: float | None = None
    setup: float | None = None

    def __post_init__(self):
        for name in ("beta", "taper", "grating", "setup"):
            object.__setattr__(self, name, _check(name, getattr(self, name)))
        if self.beta is None or self.taper is None:
            raise ExperimentError("beta and taper are required")

    @property
    def total_on_chip(self):
        return self.beta * self.taper

    @property
    def ideal_collection(self):
        if self.grating is None:
            return None
        return self.total_on_chip * self.grating

    @property
    def first_lens_predicted(self):
        if self.ideal_collection is None or self.setup is None:
            return None
        return self.ideal_collection * self.setup

    def excess_loss_ratio(self, measured):
        """Measured first-lens efficiency over the ideal collection efficiency."""
        measured = _check("measured", measured)
        if self.ideal_collection is None:
            raise ExperimentError("excess-loss ratio needs the grating efficiency")
        return measured / self.ideal_collection

    def to_dict(self):
        return {
            "beta": self.beta,
            "taper": self.taper,
            "grating": self.grating,
            "setup": self.setup,
            "total_on_chip": self.total_on_chip,
            "ideal_collection": self.ideal_collection,
            "first_lens_predicted": self.first_lens_predicted,
        }


def efficiency_budget(beta, taper, grating=None, setup=None):
    return EfficiencyBudget(beta, taper, grating, setup)


def percent(x):
    """Whole-percent label as quoted in summaries (0.34085 -> "34%")."""
    return f"{round(100 * x):d}%"
