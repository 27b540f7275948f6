"""exzero: p-adic L-functions of Tate curves and their exceptional zeros.

Subpackages and modules:

* :mod:`exzero.padic` -- exact Q_p arithmetic with precision tracking
* :mod:`exzero.iwasawa` -- group-ring towers and the derivative-of-measure calculus
* :mod:`exzero.curve` -- reduction types, Tate parameters, L-invariants
* :mod:`exzero.modsym` -- Manin symbols and the plus eigen-symbol of a curve
* :mod:`exzero.lpfunc` -- the Mazur-Tate-Teitelbaum measure and its derivatives
* :mod:`exzero.cohomlab` -- finite-group Selmer complexes and height pairings
* :mod:`exzero.service` / :mod:`exzero.cli` -- FastAPI surface and thin client
"""

__version__ = "0.1.0"
