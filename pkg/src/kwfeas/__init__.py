"""Feasibility of Kiefer-Wolfowitz optimality systems for saturated designs
of the Rasch Poisson counts model."""

__version__ = "0.1.0"
