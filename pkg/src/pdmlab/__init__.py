"""pdmlab: symbolic and numerical verification lab for position-dependent-mass
Schrodinger operators, their first-order integrals of motion and spectra."""

__version__ = "0.1.0"
