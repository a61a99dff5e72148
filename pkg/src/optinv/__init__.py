"""Simulation and inversion of two black-box linear optical imaging systems.

Subsystems:

* triple-random-phase encryption (``optinv.trpe``) and its known-plaintext
  attack via complex-valued linear regression (``optinv.regression``)
* single-pixel imaging (``optinv.spi``) and blind reconstruction via
  pattern regression plus total-variation compressive sensing
  (``optinv.tvrecon``)

Experiment pipelines and the ``optinv`` command line live in
``optinv.pipelines`` / ``optinv.cli``.
"""

__version__ = "0.1.0"
