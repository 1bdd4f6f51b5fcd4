"""Translations between the sequent calculus, the deep-inference system and
first-order nets: formula-level conversions, cut elimination, decomposition
into phase normal forms, net extraction and sequentialization."""

from .eqpath import eq_primitive_path, moves_to_cert, normalize_trace
from .sequent_ops import (
    identity_proof,
    ks1_to_lk1,
    lift_through,
    lk1_to_ks1,
    rule_sequent,
)
from .cutelim import cut_eliminate, subst_proof
from .extract import mll1_to_fonet, mls1_to_fonet, rectify_derivation
from .seq import SplitVerdict, fonet_to_mls1, sequentialize_fonet, splitting_search
from .decomp import cw_decompose, lk1_decompose, mls1_decompose

__all__ = [
    "eq_primitive_path",
    "moves_to_cert",
    "normalize_trace",
    "identity_proof",
    "lift_through",
    "rule_sequent",
    "lk1_to_ks1",
    "ks1_to_lk1",
    "cut_eliminate",
    "subst_proof",
    "mll1_to_fonet",
    "mls1_to_fonet",
    "rectify_derivation",
    "SplitVerdict",
    "splitting_search",
    "sequentialize_fonet",
    "fonet_to_mls1",
    "lk1_decompose",
    "mls1_decompose",
    "cw_decompose",
]
