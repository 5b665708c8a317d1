"""Solve the exported LP/MIP model files with an external solver (scipy's
HiGHS) and compare against the in-process results. Skipped when scipy is not
installed."""

import re

import pytest

import adamdp

scipy_opt = pytest.importorskip("scipy.optimize")
np = pytest.importorskip("numpy")


def _parse_expr(text):
    terms, sign, coeff = {}, 1.0, None
    for tok in text.split():
        if tok == "+":
            sign = 1.0
        elif tok == "-":
            sign = -1.0
        elif coeff is None:
            coeff = float(tok)
        else:
            terms[tok] = terms.get(tok, 0.0) + sign * coeff
            sign, coeff = 1.0, None
    return terms


def _parse_lp(path):
    objective, cons, binaries, frees = {}, [], set(), set()
    section = None
    for line in open(path):
        line = line.strip()
        if not line or line.startswith("\\"):
            continue
        if line in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
            section = line
            continue
        if section == "Minimize":
            objective = _parse_expr(line.split(":", 1)[1])
        elif section == "Subject To":
            _, body = line.split(":", 1)
            m = re.match(r"(.*?)(>=|<=|=)\s*([-\d.eE+]+)$", body.strip())
            cons.append((_parse_expr(m.group(1)), m.group(2), float(m.group(3))))
        elif section == "Bounds":
            frees.add(line.split()[0])
        elif section == "Binaries":
            binaries.update(line.split())
    return objective, cons, binaries, frees


def _variables(objective, cons, binaries, frees):
    names = set(objective) | binaries | frees
    for terms, _, _ in cons:
        names |= set(terms)
    order = sorted(names)
    return order, {v: i for i, v in enumerate(order)}


@pytest.fixture()
def toy():
    return adamdp.toy_counterexample(0.5, -1)


def test_lp_optimum_matches_solver(tmp_path, toy):
    path = str(tmp_path / "model.lp")
    spec = adamdp.AdherenceSpec.scalar(0.5)
    adamdp.export_lp(toy.instance, toy.baseline("base"), spec, path)
    objective, cons, binaries, frees = _parse_lp(path)
    order, idx = _variables(objective, cons, binaries, frees)
    c = np.zeros(len(order))
    for v, coef in objective.items():
        c[idx[v]] = coef
    rows, rhs = [], []
    for terms, sense, b in cons:
        row = np.zeros(len(order))
        for v, coef in terms.items():
            row[idx[v]] = coef
        rows.append(-row if sense == ">=" else row)
        rhs.append(-b if sense == ">=" else b)
    res = scipy_opt.linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs),
                            bounds=[(None, None)] * len(order), method="highs")
    sol = adamdp.solve_adamdp(toy.instance, toy.baseline("base"), spec)
    assert res.status == 0
    assert res.fun == pytest.approx(sol.return_, abs=1e-7)


def test_mip_optimum_matches_enumeration(tmp_path, toy):
    path = str(tmp_path / "model_mip.lp")
    adamdp.export_mip(toy.instance, toy.baseline("alg"), toy.baseline("base"), 2, path)
    objective, cons, binaries, frees = _parse_lp(path)
    order, idx = _variables(objective, cons, binaries, frees)
    c = np.zeros(len(order))
    for v, coef in objective.items():
        c[idx[v]] = coef
    rows, lo, hi = [], [], []
    for terms, sense, b in cons:
        row = np.zeros(len(order))
        for v, coef in terms.items():
            row[idx[v]] = coef
        rows.append(row)
        lo.append(b if sense in (">=", "=") else -np.inf)
        hi.append(b if sense in ("<=", "=") else np.inf)
    integrality = np.array([1.0 if v in binaries else 0.0 for v in order])
    bounds = scipy_opt.Bounds(
        np.array([0.0 if v in binaries else -np.inf for v in order]),
        np.array([1.0 if v in binaries else np.inf for v in order]),
    )
    res = scipy_opt.milp(
        c,
        constraints=scipy_opt.LinearConstraint(np.array(rows), np.array(lo), np.array(hi)),
        integrality=integrality,
        bounds=bounds,
    )
    oracle = adamdp.evaluate_constrained(toy.instance, toy.baseline("alg"),
                                         toy.baseline("base"), 2)
    assert res.status == 0
    assert res.fun == pytest.approx(oracle.worst_return, abs=1e-7)
