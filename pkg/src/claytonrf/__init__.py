"""Clayton-like spatial copula random fields: simulation, densities, inference."""

__version__ = "0.1.0"
