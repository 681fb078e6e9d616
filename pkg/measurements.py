# =========================================================
# measurements.py - WIDTH AND SIZE MEASUREMENTS OF REDUCED PROGRAMS
# =========================================================

from typing import Iterable, List, Optional

import numpy as np
import pandas as pd
from sklearn.linear_model import LinearRegression

from asp_syntax import max_arity, symbol_count
from config import get_logger
from graphs_td import primal_graph, rule_graph, td_minfill
from models import ElpProgram, elitof
from reduction import ReductionOptions, reduce
from sample_programs import chain_elp

logger = get_logger("measurements")


def width_table(program: ElpProgram, bss_mode: str = "naive", seed: int = 0) -> pd.DataFrame:
    """One row per rule of the reduced program: variable count and rule-graph width"""
    reduced = reduce(program, ReductionOptions(bss_mode=bss_mode, td_seed=seed))
    rows = []
    for index, rule in enumerate(reduced.rules, start=1):
        variables = rule.variables()
        width = td_minfill(rule_graph(rule), seed).width if variables else 0
        rows.append({
            "rule": index,
            "head": ",".join(a.predicate for a in rule.head) or "#false",
            "atoms": len(rule.atoms()),
            "variables": len(variables),
            "width": width,
        })
    return pd.DataFrame(rows, columns=["rule", "head", "atoms", "variables", "width"])


def chain_width_series(ns: Iterable[int], bss_mode: str = "naive", elits: int = 0,
                       layout: str = "grid") -> pd.DataFrame:
    """Primal-graph width against the widest reduced rule, per chain length"""
    rows = []
    for n in ns:
        program = chain_elp(n, elits, layout)
        table = width_table(program, bss_mode)
        rows.append({
            "n": n,
            "primal_width": td_minfill(primal_graph(program)).width,
            "max_rule_width": int(table["width"].max()),
            "max_rule_variables": int(table["variables"].max()),
        })
        logger.info("📊 chain n=%d (%s): max rule width %d", n, bss_mode, rows[-1]["max_rule_width"])
    return pd.DataFrame(rows)


def size_record(program: ElpProgram, opts: Optional[ReductionOptions] = None) -> dict:
    reduced = reduce(program, opts)
    return {
        "n": len(program.atoms),
        "e": len(elitof(program)),
        "rules": len(reduced.rules),
        "symbols": symbol_count(reduced),
        "max_arity": max_arity(reduced),
    }


def size_scaling_fit(records: List[dict]) -> dict:
    """Least-squares fit of symbols ~ a*e*n + b*n + c*e + d, with R^2"""
    df = pd.DataFrame(records)
    features = np.column_stack([df["e"] * df["n"], df["n"], df["e"]]).astype(float)
    target = df["symbols"].to_numpy(dtype=float)
    model = LinearRegression(fit_intercept=True).fit(features, target)
    return {
        "en": float(model.coef_[0]),
        "n": float(model.coef_[1]),
        "e": float(model.coef_[2]),
        "const": float(model.intercept_),
        "r2": float(model.score(features, target)),
    }
