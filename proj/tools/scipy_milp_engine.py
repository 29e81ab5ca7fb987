#!/usr/bin/env python3
# Copyright 2026 The ccpart Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""External MILP engine for ccpart backed by scipy.optimize.milp (HiGHS).

Usage: scipy_milp_engine.py MODEL.lp SOLUTION.sol [--gap G] [--time-limit T]

Reads the LP text written by ccpart and writes the solution format the
adapter expects. Set CCPART_MILP_ENGINE to e.g.
  python3 /path/to/scipy_milp_engine.py {model} {solution} --gap {gap} --time-limit {time_limit}
"""

import argparse
import math
import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

RELATIONS = ("<=", ">=", "=<", "=>", "=", "<", ">")
TOKEN = re.compile(r"<=|>=|=<|=>|[<>=]|[^\s<>=]+")


def number(tok):
    low = tok.lower()
    if low in ("inf", "+inf", "infinity", "+infinity"):
        return math.inf
    if low in ("-inf", "-infinity"):
        return -math.inf
    try:
        return float(tok)
    except ValueError:
        return None


def parse_terms(tokens):
    terms, const = [], 0.0
    sign, coef = 1.0, None
    for tok in tokens:
        if tok == "+":
            continue
        if tok == "-":
            sign = -sign
            continue
        val = number(tok)
        if val is not None:
            coef = val
            continue
        terms.append((tok, sign * (1.0 if coef is None else coef)))
        sign, coef = 1.0, None
    if coef is not None:
        const += sign * coef
    return terms, const


def parse_lp(path):
    names, index = [], {}

    def touch(name):
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    section = None
    sense = 1.0
    offset = 0.0
    objective = []
    rows = []
    bounds = []
    binaries = []
    pending = []

    def flush():
        if not pending:
            return
        toks = list(pending)
        pending.clear()
        if toks[0].endswith(":"):
            toks = toks[1:]
        pos = next(i for i, t in enumerate(toks) if t in RELATIONS)
        terms, const = parse_terms(toks[:pos])
        rhs = number(toks[pos + 1]) - const
        rel = toks[pos]
        lo, hi = -math.inf, math.inf
        if rel in ("<=", "=<", "<"):
            hi = rhs
        elif rel in (">=", "=>", ">"):
            lo = rhs
        else:
            lo = hi = rhs
        rows.append(([(touch(v), c) for v, c in terms], lo, hi))

    with open(path) as fh:
        for raw in fh:
            line = raw
            if "\\" in line:
                comment = line[line.index("\\") + 1:].strip()
                if comment.startswith("offset"):
                    offset = float(comment.split()[1])
                line = line[: line.index("\\")]
            toks = TOKEN.findall(line)
            if not toks:
                continue
            head = toks[0].lower()
            header = True
            if head in ("minimize", "minimise", "min"):
                section, sense = "obj", 1.0
            elif head in ("maximize", "maximise", "max"):
                section, sense = "obj", -1.0
            elif head in ("subject", "st", "s.t.", "such"):
                section = "rows"
            elif head in ("bounds", "bound"):
                flush()
                section = "bounds"
            elif head in ("binaries", "binary", "bin"):
                flush()
                section = "bin"
            elif head == "end":
                flush()
                section = "end"
            else:
                header = False
            if header:
                continue
            if section == "obj":
                if toks[0].endswith(":"):
                    toks = toks[1:]
                terms, const = parse_terms(toks)
                offset += sense * const
                objective += [(touch(v), sense * c) for v, c in terms]
            elif section == "rows":
                for tok in toks:
                    if tok.endswith(":") and pending:
                        flush()
                    pending.append(tok)
                if len(pending) >= 2 and pending[-2] in RELATIONS:
                    flush()
            elif section == "bounds":
                if len(toks) == 2 and toks[1].lower() == "free":
                    bounds.append((touch(toks[0]), -math.inf, math.inf))
                elif len(toks) == 5:
                    bounds.append((touch(toks[2]), number(toks[0]), number(toks[4])))
                elif len(toks) == 3 and number(toks[2]) is not None:
                    v, rel, val = touch(toks[0]), toks[1], number(toks[2])
                    if rel in ("<=", "=<"):
                        bounds.append((v, None, val))
                    elif rel in (">=", "=>"):
                        bounds.append((v, val, None))
                    else:
                        bounds.append((v, val, val))
                elif len(toks) == 3:
                    v, rel, val = touch(toks[2]), toks[1], number(toks[0])
                    bounds.append((v, val, None) if rel in ("<=", "=<") else (v, None, val))
                else:
                    raise ValueError("unrecognized bound: " + line.strip())
            elif section == "bin":
                binaries += [touch(t) for t in toks]
    flush()

    n = len(names)
    c = np.zeros(n)
    for j, v in objective:
        c[j] += v
    lo = np.zeros(n)
    hi = np.full(n, math.inf)
    integrality = np.zeros(n)
    for j in binaries:
        integrality[j] = 1
        hi[j] = 1.0
    for j, l, u in bounds:
        if l is not None:
            lo[j] = l
        if u is not None:
            hi[j] = u
    r, col, val, rlo, rhi = [], [], [], [], []
    for i, (terms, l, u) in enumerate(rows):
        for j, v in terms:
            r.append(i)
            col.append(j)
            val.append(v)
        rlo.append(l)
        rhi.append(u)
    A = coo_matrix((val, (r, col)), shape=(len(rows), n)).tocsr()
    return names, c, offset, sense, A, np.array(rlo), np.array(rhi), lo, hi, integrality


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("model")
    ap.add_argument("solution")
    ap.add_argument("--gap", type=float, default=1e-6)
    ap.add_argument("--time-limit", type=float, default=0.0)
    args = ap.parse_args()

    names, c, offset, sense, A, rlo, rhi, lo, hi, integrality = parse_lp(args.model)
    options = {"mip_rel_gap": args.gap, "disp": False}
    if args.time_limit > 0:
        options["time_limit"] = args.time_limit
    constraints = [LinearConstraint(A, rlo, rhi)] if A.shape[0] else []
    res = milp(c, integrality=integrality, bounds=Bounds(lo, hi),
               constraints=constraints, options=options)
    # status codes: 0 optimal, 1 iteration/time limit, 2 infeasible, 3 unbounded
    status = {0: "Optimal", 1: "TimeLimit", 2: "Infeasible", 3: "Unbounded"}.get(res.status, "Error")
    with open(args.solution, "w") as out:
        if status in ("Optimal", "TimeLimit") and res.x is None:
            status = "Error" if status == "Optimal" else "Infeasible"
        out.write("status %s\n" % status)
        if res.x is not None:
            out.write("objective %.17g\n" % (sense * (res.fun + offset)))
            bound = getattr(res, "mip_dual_bound", None)
            if bound is not None and np.isfinite(bound):
                out.write("bound %.17g\n" % (bound + offset))
            for name, v in zip(names, res.x):
                out.write("%s %.17g\n" % (name, v))
    return 0


if __name__ == "__main__":
    sys.exit(main())
