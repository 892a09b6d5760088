"""Succinct building blocks: packed integers, bitvectors, wavelet and RMQ."""

from .bitvector import Bitvector, SparseBitvector, SparseBitvectorBuilder
from .intvector import IntVector, IntVectorBuilder, bits_needed
from .permutation import Permutation
from .rmq import RmqStructure, SparseMinTable
from .wavelet import WaveletTree

__all__ = [
    "Bitvector",
    "IntVector",
    "IntVectorBuilder",
    "Permutation",
    "RmqStructure",
    "SparseBitvector",
    "SparseBitvectorBuilder",
    "SparseMinTable",
    "WaveletTree",
    "bits_needed",
]
