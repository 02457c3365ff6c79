"""Y-STR haplotype matching and mixture analysis."""

from ._core import (
    HaplodriftError,
    Kit,
    aggregate_mutation_rate,
    equilibrium,
    ks_uniform_pvalue,
    load_kit,
    match_probability,
    normalize_haplotype,
    run_cli,
    simulate,
)

__all__ = [
    "HaplodriftError",
    "Kit",
    "aggregate_mutation_rate",
    "equilibrium",
    "ks_uniform_pvalue",
    "load_kit",
    "match_probability",
    "normalize_haplotype",
    "run_cli",
    "simulate",
]
