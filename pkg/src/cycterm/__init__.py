"""Termination and relative termination of cycle rewriting."""
from .words import Alphabet, Rule, Srs, SrsError, canonical_rotation, cycle_equal, cycle_successors, make_srs
from .tpdb import parse_tpdb, print_tpdb, read_tpdb
from .prover import ProverConfig, Strategy, prove
from .proof import Verdict, verify_certificate

__all__ = ["Alphabet", "Rule", "Srs", "SrsError", "canonical_rotation", "cycle_equal", "cycle_successors",
           "make_srs", "parse_tpdb", "print_tpdb", "read_tpdb", "ProverConfig", "Strategy", "prove",
           "Verdict", "verify_certificate"]
__version__ = "0.1.0"
