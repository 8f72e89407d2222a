"""Random-circuit sampling lab: state-vector simulation, Porter-Thomas
datasets, XEB and related statistics, an exact DBM wavefunction builder and
table-based generative baselines."""

__version__ = "0.1.0"

from ._accel import backend_name, set_threads
from .circuit import Circuit, Connectivity, Gate, random_circuit
from .core import (EmptyRequestError, ExplicitDistribution, ParseError, Prng,
                   QslError, ResourceCapError, SampleSet, ValidationError)

__all__ = [
    "__version__", "backend_name", "set_threads", "Circuit", "Connectivity", "Gate",
    "random_circuit", "EmptyRequestError", "ExplicitDistribution", "ParseError", "Prng",
    "QslError", "ResourceCapError", "SampleSet", "ValidationError",
]
