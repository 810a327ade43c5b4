"""Synthetic-site generation, scripted oracles, and policy comparisons."""

from .agents import ScriptedLexicalAgent, ScriptedReflector
from .comparison import (
    ComparisonReport,
    NullMemory,
    PolicySpec,
    paired_exact_p,
    run_comparison,
    run_policy,
    standard_batch,
    task_config,
)
from .sites import (
    SimBrowserEnv,
    SimFetcher,
    SimSearchClient,
    SyntheticSite,
    generate_site,
)

__all__ = [
    "ComparisonReport", "NullMemory", "PolicySpec", "ScriptedLexicalAgent",
    "ScriptedReflector", "SimBrowserEnv", "SimFetcher", "SimSearchClient",
    "SyntheticSite", "generate_site", "paired_exact_p", "run_comparison",
    "run_policy", "standard_batch", "task_config",
]
