"""Certified numerics for primitive sets: Mertens and Zhang prime scans,
the constant sum 1/(p log p), and f/g/h functionals on finite primitive sets."""

__version__ = "0.1.0"
