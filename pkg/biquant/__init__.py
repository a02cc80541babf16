"""Exact computer algebra for quotients of enveloping algebras of nilpotent Lie algebras."""
from biquant.dsl import load_file, parse, pretty_print
from biquant.errors import BiquantError
from biquant.lie import LieAlgebra
from biquant.settings import Settings

__version__ = "0.1.0"
