"""Deciding multiple positive zeros of augmented vertically parametrized systems."""

from .engine import Certificate, Verdict, VerdictKind, decide
from .errors import MultizeroError
from .model import (AugmentedVerticalSystem, build_system, format_system, network_to_system,
                    parse_network, parse_system)
from .witness import Witness, verify_witness

__version__ = "0.1.0"

__all__ = ["AugmentedVerticalSystem", "Certificate", "MultizeroError", "Verdict", "VerdictKind",
           "Witness", "build_system", "decide", "format_system", "network_to_system",
           "parse_network", "parse_system", "verify_witness"]
