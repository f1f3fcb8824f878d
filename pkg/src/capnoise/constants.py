"""Physical constants (CODATA 2018 exact values).

Formulas elsewhere in the package read these through the module object
(``constants.K_B``) so a debug hook can perturb them and watch the
self-test regressions fail.
"""

K_B = 1.380649e-23
"""Boltzmann constant, J/K."""

Q_E = 1.602176634e-19
"""Elementary charge, C."""
