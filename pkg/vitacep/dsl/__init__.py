"""
VITACEP - Event-Pattern Language

Parsing, canonical formatting, compilation and evaluation of definitions
such as "VolOverload := (HR > 140) OR (Cycling AND detect-climb(Altitude))".
"""

from vitacep.dsl.compiler import compile_definition
from vitacep.dsl.formatter import format_definition
from vitacep.dsl.parser import parse
from vitacep.dsl.plan import EvaluationPlan, evaluate

__all__ = ["EvaluationPlan", "compile_definition", "evaluate", "format_definition", "parse"]
