from .adc import AdcInstance, adc_problem, adc_power, default_adc_instance, REFERENCE_OPTIMUM
from .dfa import (
    DfaInstance,
    assemble_sequence,
    orient_for_assembly,
    dfa_problem,
    read_fasta,
    similarity_matrix,
    smith_waterman,
    ECOLI_FRAGMENTS,
    ECOLI_REFERENCE_ORDER,
    ECOLI_SECTION,
    TOY_FRAGMENTS,
)
from .cmdp import FiniteCmdp, cmdp_to_h, all_rules, RuleSpaceTooLarge

__all__ = [
    "AdcInstance", "adc_problem", "adc_power", "default_adc_instance", "REFERENCE_OPTIMUM",
    "DfaInstance", "assemble_sequence", "orient_for_assembly", "dfa_problem", "read_fasta", "similarity_matrix",
    "smith_waterman", "ECOLI_FRAGMENTS", "ECOLI_REFERENCE_ORDER", "ECOLI_SECTION", "TOY_FRAGMENTS",
    "FiniteCmdp", "cmdp_to_h", "all_rules", "RuleSpaceTooLarge",
]
