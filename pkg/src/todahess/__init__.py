"""Mixed Toda-Hessian spectra for s-fold symmetric one-harmonic maps.

Subpackages by theme:

* maps          -- thresholds, inverse branch, univalence geometry
* raney         -- exact Raney numbers and their asymptotics
* gram          -- Gram vectors, scalar weights, weighted blocks
* spectra       -- eigen-decompositions, stiff/soft spectral checks
* continuation  -- hypergeometric continuation of the scalar Gram data
* stieltjes     -- moments, Jacobi recurrences, Weyl and Perron formulas
* cli           -- command-line surface, CSV/SVG emission, selftest
"""

__version__ = "0.1.0"
