"""Higher idele class groups mod n: Milnor K-symbols, Parshin chains and reciprocity checks."""

__version__ = "0.1.0"
