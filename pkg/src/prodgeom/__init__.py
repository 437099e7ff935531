"""Numerical geometry of submanifolds of Q_eps^n x R."""
__version__ = "0.1.0"
