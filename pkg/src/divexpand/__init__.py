"""Numerical and combinatorial companions to a spectral bound for the divisibility graph.

Modules: arith (windows, primes, Liouville), divgraph (the operator A and its
spectrum), walks (traces as closed-walk sums), shapes, coloring and codec (the
combinatorics of walk shapes), geom (a lattice counting lemma), sieve
(composite-moduli sieves and sieve graphs) and cli.
"""

__version__ = "0.1.0"
