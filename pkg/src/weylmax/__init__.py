"""weylmax: certified numerics for maximal quadratic exponential sums."""

__version__ = "0.1.0"
