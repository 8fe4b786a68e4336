"""Harmonic analysis of radial and K-type data on rank-one symmetric spaces."""
