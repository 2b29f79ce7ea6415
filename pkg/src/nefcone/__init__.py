"""Exact cone combinatorics and certificates for rank-4 semiabelian degenerations.

Subpackages, in dependency order:

* :mod:`nefcone.lattice_forms` -- exact quadratic-form arithmetic on Z^g.
* :mod:`nefcone.cone_atlas` -- the built-in cones, reflection groups, and
  bicoloured-graph face bookkeeping.
* :mod:`nefcone.cone_engine` -- membership, duality, dicings, support
  functions, and the two-stage projection invariants gamma/delta.
* :mod:`nefcone.wall_calculus` -- wall-crossing relations and intersection
  numbers with the two distinguished boundary test curves.
* :mod:`nefcone.emin_lab` -- the shifted-minimum function of the core form
  and its certified quadrature.
* :mod:`nefcone.nef_certify` -- nef/ample region tests, divisor bookkeeping
  identities, and the depth-degeneration bounds.
* :mod:`nefcone.cli` -- command-line front end.
"""

__version__ = "0.1.0"
