"""Exact computations for parabolically induced modules of gl(2n), gl(lambda)
and the hyperboloid algebra, and the q-series identities read off from them."""

__version__ = "0.1.0"
