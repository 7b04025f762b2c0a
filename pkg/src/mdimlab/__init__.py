"""Finite-scale estimators and checks for metric mean dimension of Z^d actions."""

__version__ = "0.1.0"
