"""Inequality verification: margins, hypothesis gating and reports.

Each theorem check produces one report per (p, k) with both sides of the
inequality, the margin in the inequality's own orientation, and an error
budget for the discretization.  A check passes only when the margin
clears the budget; hypothesis failures downgrade the verdict to
not-applicable instead of silently passing.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry, problems
from .geometry import constant_C2, geometric_summary
from .mesh import Mesh
from .problems import ProblemSpec

THEOREM_IDS = ("KS-1.1", "KS-1.2", "HS-1.3", "MAIN-1", "COR-BALL",
               "MAIN-2", "LEM-ORDER", "CONJ-1.7")

# default relative eigenvalue error assumed for the budget when the caller
# provides none; representative of order-2 elements at moderate mesh size
DEFAULT_REL_ERROR = 5e-3


@dataclass(frozen=True)
class InequalityReport:
    theorem_id: str
    p: int
    k: int
    lhs: float
    rhs: float
    margin: float
    status: str                 # pass | fail | not-applicable | exploratory
    orientation: str            # "lhs<=rhs" or "lhs>=rhs"
    hypothesis_flags: dict
    inputs: dict
    error_budget: float
    extrapolated: float | None = None

    @property
    def passed(self):
        return {"pass": True, "fail": False}.get(self.status)

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "p": self.p,
            "k": self.k,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "pass": self.status,
            "orientation": self.orientation,
            "hypothesis_flags": self.hypothesis_flags,
            "inputs": self.inputs,
            "error_budget": self.error_budget,
            "extrapolated": self.extrapolated,
        }


def _budget(rel_error: float, rhs: float) -> float:
    return 3.0 * rel_error * abs(rhs)


def _verdict(margin: float, budget: float, strict: bool = True) -> str:
    if strict:
        return "pass" if margin > budget else "fail"
    return "pass" if margin >= -budget else "fail"


class _SpectrumCache:
    """Memoized problem solves for one (mesh, order)."""

    def __init__(self, mesh: Mesh, nodal_order: int):
        self.mesh = mesh
        self.order = nodal_order
        self._store: dict = {}

    def values(self, problem_id: str, p: int, k: int) -> np.ndarray:
        key = (problem_id, p)
        have = self._store.get(key)
        if have is None or len(have) < k:
            res = problems.solve(ProblemSpec(problem_id, p, k, self.mesh, self.order))
            self._store[key] = res.values
        return self._store[key][:k]


def verify(theorem_id: str, mesh: Mesh, x0=None, p: int = 0, k_range=(1,),
           nodal_order: int = 2, rel_error: float = DEFAULT_REL_ERROR,
           cluster_rtol: float = 1e-6) -> list:
    """Evaluate one theorem's inequality on a mesh, one report per k.

    x0 defaults to the mesh centroid.  Star-shapedness is measured, not
    assumed; failed hypotheses yield not-applicable verdicts.
    """
    if theorem_id not in THEOREM_IDS:
        raise ValueError(f"unknown theorem id '{theorem_id}'")
    x0 = mesh.centroid() if x0 is None else np.asarray(x0, dtype=float)
    geo = geometric_summary(mesh, x0)
    flags = {"star_shaped": geo.star_shaped, "convex": geo.convex, "flat": True}
    inputs_base = {"mesh": mesh.domain_tag, "x0": list(geo.x0),
                   "h_min": geo.h_min, "h_max": geo.h_max, "r_max": geo.r_max,
                   "nodal_order": nodal_order}
    cache = _SpectrumCache(mesh, nodal_order)
    kmax = max(k_range)
    n = 2
    out = []

    def rep(k, lhs, rhs, status, orientation, extra=None, p_=None, budget=None):
        margin = (rhs - lhs) if orientation == "lhs<=rhs" else (lhs - rhs)
        inputs = dict(inputs_base)
        if extra:
            inputs.update(extra)
        out.append(InequalityReport(
            theorem_id, p if p_ is None else p_, int(k), float(lhs), float(rhs),
            float(margin), status, orientation, flags, inputs,
            _budget(rel_error, rhs) if budget is None else budget))

    if theorem_id == "KS-1.1":
        mu = cache.values("neumann_absolute", 0, kmax)
        sig = cache.values("steklov", 0, kmax)
        ell = cache.values("bsn_scalar", 0, kmax)
        for k in k_range:
            lhs = mu[k - 1] * sig[0]
            rep(k, lhs, ell[k - 1], _verdict(ell[k - 1] - lhs, _budget(rel_error, ell[k - 1])),
                "lhs<=rhs", {"variant": "mu_k.sigma_1<=ell_k"}, p_=0)
            lhs = mu[0] * sig[k - 1]
            rep(k, lhs, ell[k - 1], _verdict(ell[k - 1] - lhs, _budget(rel_error, ell[k - 1])),
                "lhs<=rhs", {"variant": "mu_1.sigma_k<=ell_k"}, p_=0)

    elif theorem_id == "KS-1.2":
        q1 = cache.values("bsd_scalar", 0, 1)[0]
        s1 = cache.values("steklov", 0, 1)[0]
        l1 = cache.values("bsn_scalar", 0, 1)[0]
        m1 = cache.values("neumann_absolute", 0, 1)[0]
        la1 = cache.values("dirichlet", 0, 1)[0]
        cases = [
            ("i:q1.sigma1^2<=ell1", q1 * s1 ** 2, l1),
            ("ii:1/mu1<=1/lambda1+1/sqrt(q1.ell1)", 1.0 / m1,
             1.0 / la1 + 1.0 / math.sqrt(q1 * l1)),
            ("iii:1/mu1<=1/lambda1+1/(q1.sigma1)", 1.0 / m1,
             1.0 / la1 + 1.0 / (q1 * s1)),
        ]
        for variant, lhs, rhs in cases:
            rep(1, lhs, rhs, _verdict(rhs - lhs, _budget(rel_error, rhs)),
                "lhs<=rhs", {"variant": variant}, p_=0)

    elif theorem_id == "HS-1.3":
        mu1 = cache.values("neumann_absolute", 0, 1)[0]
        s1 = cache.values("steklov", 0, 1)[0]
        c0 = 2.0  # flat planar constant
        rhs = geo.h_min * mu1 / (2.0 * geo.r_max * math.sqrt(mu1) + c0)
        status = ("not-applicable" if not geo.star_shaped
                  else _verdict(s1 - rhs, _budget(rel_error, rhs)))
        rep(1, s1, rhs, status, "lhs>=rhs", {"C0": c0}, p_=0)

    elif theorem_id in ("MAIN-1", "COR-BALL"):
        pp = p if p >= 1 else 1
        mu1 = cache.values("neumann_absolute", pp, 1)[0]
        s1 = cache.values("steklov", pp, 1)[0]
        if theorem_id == "MAIN-1":
            # flat comparison term: max(1 + d.H_0(d)) = n
            rhs = (0.5 * geo.h_min * mu1) / (geo.r_max * math.sqrt(mu1) + 0.5 * n)
            ok = geo.star_shaped and geo.convex
            extra = {"comparison_max": float(n)}
        else:
            r = geo.r_max
            rhs = r * mu1 / (2.0 * r * math.sqrt(mu1) + n)
            ok = geo.star_shaped
            extra = {"radius": r}
        status = "not-applicable" if not ok else _verdict(s1 - rhs, _budget(rel_error, rhs))
        rep(1, s1, rhs, status, "lhs>=rhs", extra, p_=pp)

    elif theorem_id == "MAIN-2":
        pp = p if p >= 1 else 1
        lam = cache.values("dirichlet", pp, kmax)
        qq = cache.values("bsd2", pp, kmax)
        c2 = constant_C2(pp, n, 0.0, 0.0, geo.r_max)
        for k in k_range:
            rhs = (4.0 * qq[k - 1] ** 2 * geo.r_max ** 2
                   + 2.0 * qq[k - 1] * geo.h_min * c2) / geo.h_min ** 2
            status = ("not-applicable" if not geo.star_shaped
                      else _verdict(rhs - lam[k - 1], _budget(rel_error, rhs)))
            rep(k, lam[k - 1], rhs, status, "lhs<=rhs", {"C2": c2}, p_=pp)

    elif theorem_id == "LEM-ORDER":
        # non-strict ordering; for p = 0 the two quotients coincide exactly
        if p == 0:
            q = cache.values("bsd_scalar", 0, kmax)
            source = "bsd_scalar"
        else:
            q = cache.values("bsd1", p, kmax)
            source = "harmonic-ratio spectrum (certified as q only for k=1)"
        qq = cache.values("bsd2", p, kmax)
        for k in k_range:
            status = _verdict(qq[k - 1] - q[k - 1], _budget(rel_error, qq[k - 1]),
                              strict=False)
            rep(k, q[k - 1], qq[k - 1], status, "lhs<=rhs", {"q_source": source})

    elif theorem_id == "CONJ-1.7":
        pp = p if p >= 1 else 1
        lam = cache.values("dirichlet", pp, kmax + 4)
        hr = cache.values("bsd1", pp, kmax + 8)
        for k in k_range:
            m_k = _multiplicity(lam, k - 1, cluster_rtol)
            ratio = lam[k - 1] * (geo.r_max + geo.h_max) / hr[m_k - 1]
            rep(k, ratio, float("nan"), "exploratory", "lhs<=rhs",
                {"multiplicity": m_k, "note": "empirical constant, never scored"},
                p_=pp, budget=0.0)

    return out


def _multiplicity(values: np.ndarray, idx: int, rtol: float) -> int:
    """Cluster size of values[idx] under a relative gap threshold."""
    v = values[idx]
    scale = max(abs(v), 1e-300)
    return int(np.sum(np.abs(values - v) <= rtol * scale))


# -- convergence studies ----------------------------------------------------

def convergence_study(problem_id: str, p: int, shape: str, h_list,
                      k: int = 1, nodal_order: int = 1, radius: float = 1.0,
                      reference: float | None = None) -> dict:
    """Eigenvalue vs mesh size with a fitted rate and Richardson value."""
    from . import mesh as meshmod
    if len(h_list) < 3:
        raise ValueError("need at least 3 mesh sizes")
    gens = {
        "disk": lambda h: meshmod.gen_disk(radius, h),
        "square": lambda h: meshmod.gen_square(radius, h),
        "ellipse": lambda h: meshmod.gen_ellipse(1.3 * radius, 0.8 * radius, h),
    }
    if shape not in gens:
        raise ValueError(f"unknown shape '{shape}'")
    hs = sorted(float(h) for h in h_list)[::-1]
    vals = []
    for h in hs:
        m = gens[shape](h)
        res = problems.solve(ProblemSpec(problem_id, p, k, m, nodal_order))
        vals.append(float(res.values[k - 1]))
    vals = np.array(vals)
    hs = np.array(hs)
    rate, extrapolated, monotone = _fit_rate(hs, vals, reference)
    out = {"problem": problem_id, "p": p, "shape": shape, "k": k,
           "nodal_order": nodal_order, "h": list(map(float, hs)),
           "values": list(map(float, vals)), "rate": rate,
           "extrapolated": extrapolated, "monotone": monotone}
    if reference is not None:
        out["reference"] = float(reference)
        out["extrapolated_rel_error"] = abs(extrapolated - reference) / abs(reference)
    return out


def _fit_rate(hs: np.ndarray, vals: np.ndarray, reference=None):
    diffs = np.abs(np.diff(vals))
    monotone = bool(np.all(np.diff(vals) > 0) or np.all(np.diff(vals) < 0))
    if np.any(diffs == 0):
        return float("inf"), float(vals[-1]), monotone
    if reference is not None:
        errs = np.abs(vals - reference)
        fit = np.polyfit(np.log(hs), np.log(errs), 1)
        rate = float(fit[0])
    else:
        # successive-difference rate estimate, no reference needed
        rate = float(np.mean(np.log(diffs[:-1] / diffs[1:]) / np.log(hs[:-2] / hs[1:-1])))
    ratio = (hs[-2] / hs[-1]) ** rate
    extrapolated = float(vals[-1] + (vals[-1] - vals[-2]) / (ratio - 1.0))
    return rate, extrapolated, monotone


# -- report writing ---------------------------------------------------------

CSV_COLUMNS = ("theorem_id", "p", "k", "lhs", "rhs", "margin", "pass")


def report_write(reports, path, fmt: str = "json") -> None:
    """Serialize reports deterministically (byte-identical for same input)."""
    text = report_render(reports, fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def report_render(reports, fmt: str = "json") -> str:
    dicts = [r.to_dict() if isinstance(r, InequalityReport) else dict(r)
             for r in reports]
    if fmt == "json":
        return json.dumps({"reports": dicts}, indent=2, sort_keys=True,
                          allow_nan=True, default=float) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for d in dicts:
            writer.writerow([d["theorem_id"], d["p"], d["k"],
                             repr(float(d["lhs"])), repr(float(d["rhs"])),
                             repr(float(d["margin"])), d["pass"]])
        return buf.getvalue()
    raise ValueError(f"unknown format '{fmt}'")
