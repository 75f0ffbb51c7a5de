"""qmflab: a numerical laboratory for quantum modular forms.

Evaluates periodic quantum modular forms at rationals through
continued-fraction iteration of their reciprocity relation, computes the
real-line extensions along convergents and along dual partial sums, and
reproduces limiting value-distribution experiments for cotangent sums, the
Kontsevich function, Eichler integrals of cusp forms, and the A_{k,D} sums.
"""

__version__ = "0.1.0"
