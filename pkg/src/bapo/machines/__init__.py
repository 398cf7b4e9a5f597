from .majority import build_majority_machine
from .match3 import build_match3_machine
from .reachability import build_reachability_machine
from .tm import (TmSpec, build_tm_machine, run_tm, palindrome_tm,
                 matching_tm, last_bit_tm)
from .doubling import build_input_doubling_bapo, build_input_doubling_cot
from .dfa import DfaSpec, build_dfa_cbapo, parity_dfa, contains_11_dfa, run_dfa

__all__ = [
    "build_majority_machine", "build_match3_machine", "build_reachability_machine",
    "TmSpec", "build_tm_machine", "run_tm", "palindrome_tm", "matching_tm",
    "last_bit_tm", "build_input_doubling_bapo", "build_input_doubling_cot",
    "DfaSpec", "build_dfa_cbapo", "parity_dfa", "contains_11_dfa", "run_dfa",
]
