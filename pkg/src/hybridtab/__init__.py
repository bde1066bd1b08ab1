"""Decision procedures for hybrid logic with @ over all frames, strict
partial orders, serial strict partial orders and partial orders."""

from .bulldoze import (BulldozedModel, Cluster, Copy, bulldoze, certify_class,
                       detect_clusters, eval_truncated)
from .calculi import CALCULI, TAB, TAB_I4, TAB_I4D, TAB_PO, CalculusSpec, get_calculus
from .certify import certify_decision, certify_open_branch, countermodel
from .engine import (Branch, Decision, Entry, Tableau, Verdict, decide, expand,
                     is_closed, satisfy)
from .extract import ExtractedModel, check_truth_lemma, extract, named_worlds
from .semantics import FrameClass, KripkeModel, evaluate, oracle_countermodel
from .syntax import (And, At, Box, Dia, Formula, Neg, Nom, Or, Prop, parse,
                     to_nnf, to_text)

__all__ = [
    "And", "At", "Box", "Branch", "BulldozedModel", "CALCULI", "CalculusSpec",
    "Cluster", "Copy", "Decision", "Dia", "Entry", "ExtractedModel", "Formula",
    "FrameClass", "KripkeModel", "Neg", "Nom", "Or", "Prop", "TAB", "TAB_I4",
    "TAB_I4D", "TAB_PO", "Tableau", "Verdict", "bulldoze", "certify_class",
    "certify_decision", "certify_open_branch", "check_truth_lemma",
    "countermodel", "decide", "detect_clusters", "eval_truncated", "evaluate",
    "expand", "extract", "get_calculus", "is_closed", "named_worlds",
    "oracle_countermodel", "parse", "satisfy", "to_nnf", "to_text",
]
