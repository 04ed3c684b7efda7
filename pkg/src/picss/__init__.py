"""picss: exact Picard-group and fixed-point spectral sequence calculator.

Subpackages are organised bottom-up:

* ``fields``       -- finite fields GF(p, n) with deterministic moduli
* ``rings``        -- truncated local rings (monomial and cyclotomic)
* ``abelian``      -- finite abelian group recognition and presentation
* ``pk``           -- exact linear algebra over Z/p^k (Smith form et al.)
* ``trunclog``     -- truncated exponential/logarithm toolkit
* ``cohomology``   -- cyclic group cohomology and a filtration
                      spectral-sequence engine
* ``reps``         -- modular representations of cyclic groups and
                      symmetric powers
* ``cosimplicial`` -- cosimplicial rings, Dold-Kan models, a bar model
                      for the classifying space
* ``hfpss``        -- the fixed-point and Picard spectral sequence runs
* ``charts``       -- chart serialization, comparison, SVG rendering
* ``cli``          -- the ``picss`` command line tool
"""

__version__ = "0.1.0"
