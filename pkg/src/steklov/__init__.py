"""Steklov eigenvalues of geodesic balls and star-shaped domains in rank-one and warped model spaces."""
__version__ = "0.1.0"
