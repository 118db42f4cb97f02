"""Rate-equation simulator for a dipole-coupled GaN quantum-dot photocell."""

__version__ = "0.1.0"
