"""effham: effective-Hamiltonian toolkit.

Three strands share one numerical core:

* ``su2``      -- unitary (Wei-Norman) integration of driven two-level /
                  spin-j dynamics with dynamical/geometric phase splitting;
* ``feshbach`` -- projection-operator effective Hamiltonians on model
                  Hamiltonians: bound states, resonance positions and widths;
* ``variational`` -- an exact correction identity for approximate evolution
                  operators, usable as a quadrature-grade consistency check.

``effham.cli`` exposes the four scenario engines as the ``effham`` command.
"""

from . import errors, feshbach, fields, numkit, su2, variational  # noqa: F401

__version__ = "0.1.0"
