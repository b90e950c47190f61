"""Formal connections over truncated Laurent and Puiseux series with an Artinian parameter."""

from .conn import Connection, LogWitness, exponents, gauge, reduce_conn, residue
from .cyclo import CycNum
from .deform import index_invariance_check, levelwise_decompose, limit_compare, limit_gauge_chain
from .errors import PdiskError
from .generic import split_generic
from .logdecomp import (deligne_manin_lattice, descent_check, log_decompose, reconstruct,
                        verify_decomposition)
from .parse import parse_series, parse_spec
from .series import Series, SeriesParams, galois_sigma, principal_part, ramify, theta
from .split import split
from .tlj import TLJBlock, TLJForm, assemble, chinese_splitting, jordan_levelt, normalize_form

__all__ = [
    "Connection", "CycNum", "LogWitness", "PdiskError", "Series", "SeriesParams", "TLJBlock", "TLJForm",
    "assemble", "chinese_splitting", "deligne_manin_lattice", "descent_check", "exponents",
    "galois_sigma", "gauge", "index_invariance_check", "jordan_levelt", "levelwise_decompose",
    "limit_compare", "limit_gauge_chain", "log_decompose", "normalize_form", "parse_series",
    "parse_spec", "principal_part", "ramify", "reconstruct", "reduce_conn", "residue", "split",
    "split_generic", "theta", "verify_decomposition",
]
