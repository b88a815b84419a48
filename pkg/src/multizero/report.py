"""Machine-readable and text reports.

A :class:`Report` holds only JSON-ready values (strings, ints, bools, lists,
dicts), so the JSON and text renderings are produced from the same data and
``Report.from_json(r.to_json()) == r``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .engine import Certificate, Verdict, describe_exclusion
from .model import AugmentedVerticalSystem
from .signs import lambda_sets
from .witness import Witness

SCHEMA = "multizero-report/1"


def _q(v) -> str:
    return str(Fraction(v))


def _digits(precision: int) -> int:
    return int(math.ceil(precision * math.log10(2))) + 3


def _dec(v, precision: int) -> str:
    with mp.workprec(precision):
        return mpmath.nstr(mpf(v), _digits(precision), strip_zeros=False)


def _one(idx) -> list[int]:
    return [i + 1 for i in idx]


def _matrix(m) -> list[list[str]]:
    return [[_q(v) for v in row] for row in m.tolist()]


def certificate_to_dict(cert: Certificate, P) -> dict:
    lam = lambda_sets(P, cert.sigma, cert.S)
    return {
        "sigma": [list(p) for p in cert.sigma],
        "S": [list(r) for r in cert.S],
        "lambda_sets": [{k: _one(sorted(v)) for k, v in L.nonempty().items()} for L in lam],
        "exclusion": describe_exclusion(P, cert.sigma, cert.S),
        "rho": [_q(v) for v in cert.rho],
        "delta": [_q(v) for v in cert.delta],
        "delta_sign": list(cert.delta_sign),
        "z": [_q(v) for v in cert.z],
        "alpha_plus": {str(k + 1): _q(v) for k, v in cert.alpha_plus.items()},
        "alpha_minus": {str(k + 1): _q(v) for k, v in cert.alpha_minus.items()},
        "I_plus": _one(cert.I_plus),
        "I_minus": _one(cert.I_minus),
        "mu_base": [_q(v) for v in cert.mu_base],
        "sign_conditions": list(cert.sign_rows),
        "not_D": list(cert.not_d_rows),
        "constraints": cert.system.describe(),
        "branch_trace": list(cert.branch_trace),
    }


def witness_to_dict(w: Witness, verification=None) -> dict:
    p = w.precision
    out = {
        "precision": p,
        "kappa": [_dec(v, p) for v in w.kappa],
        "b": [_dec(v, p) for v in w.b],
        "x": [_dec(v, p) for v in w.x],
        "y": [_dec(v, p) for v in w.y],
        "rho": [_q(v) for v in w.rho],
        "delta": [_q(v) for v in w.delta],
        "z": [_q(v) for v in w.z],
        "residuals": {k: mpmath.nstr(v, 6) for k, v in w.residuals.items()},
        "separation": mpmath.nstr(w.separation, 6),
    }
    if verification is not None:
        out["verification"] = verification_to_dict(verification)
    return out


def verification_to_dict(rep) -> dict:
    return {"passed": rep.passed, "precision": rep.precision,
            "max_residual": mpmath.nstr(rep.max_residual, 6),
            "checks": [{"name": n, "value": mpmath.nstr(v, 6), "bound": mpmath.nstr(b, 6), "passed": ok}
                       for n, v, b, ok in rep.checks]}


def witness_from_dict(d: dict) -> Witness:
    """Rebuild a Witness; decimal strings are read at the recorded precision."""
    if "witness" in d:
        d = d["witness"]
    if not d:
        raise ValueError("no witness data")
    p = int(d["precision"])
    with mp.workprec(p):
        vec = lambda key: tuple(mpf(v) for v in d[key])
        return Witness(kappa=vec("kappa"), b=vec("b"), x=vec("x"), y=vec("y"), precision=p,
                       rho=tuple(Fraction(v) for v in d.get("rho", ())),
                       delta=tuple(Fraction(v) for v in d.get("delta", ())),
                       z=tuple(Fraction(v) for v in d.get("z", ())))


@dataclass
class Report:
    input: dict
    verdict: str
    reason: str
    reduction: dict | None = None
    certificates: list = field(default_factory=list)
    witness: dict | None = None
    stats: dict = field(default_factory=dict)
    wall_time: float = 0.0
    schema: str = SCHEMA

    @classmethod
    def from_verdict(cls, sys: AugmentedVerticalSystem, v: Verdict, wall_time: float = 0.0,
                     source: str | None = None, max_certificates: int = 10) -> Report:
        red = v.reduction
        inp = {"source": source, "n": sys.n, "m_bar": sys.m_bar, "s_bar": sys.s_bar,
               "ell_bar": sys.ell_bar, "partition_mode": v.partition_mode,
               "pbar_forest": v.pbar_forest, "p_forest": v.p_forest,
               "species": list(sys.species) if sys.species else None,
               "rate_labels": list(sys.rate_labels) if sys.rate_labels else None,
               "column_permutation": _one(sys.column_permutation)}
        reduction = None
        if red is not None:
            inp.update(s=red.s, ell=red.ell)
            reduction = {"Pbar": _matrix(red.Pbar), "tau": [_one(b) for b in red.tau],
                         "alpha": [_one(b) for b in red.alpha],
                         "gamma_prime": [_q(g) for g in red.gamma_prime],
                         "gamma": [_q(g) for g in red.gamma], "P": _matrix(red.P),
                         "U1": _one(red.U1), "U2": _one(red.U2)}
        certs = [certificate_to_dict(c, red.P) for c in v.certificates[:max_certificates]]
        wit = witness_to_dict(v.witness, v.verification) if v.witness is not None else None
        return cls(input=inp, verdict=v.kind.value, reason=v.reason, reduction=reduction,
                   certificates=certs, witness=wit, stats=v.stats.as_dict(),
                   wall_time=round(wall_time, 6))

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(asdict(self), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> Report:
        return cls(**json.loads(text))

    def to_text(self) -> str:
        inp = self.input
        lines = [f"verdict: {self.verdict}  ({self.reason})",
                 f"system: n={inp['n']}  m_bar={inp['m_bar']}  s_bar={inp['s_bar']}  "
                 f"ell_bar={inp['ell_bar']}  partitions={inp['partition_mode']}"]
        red = self.reduction
        if red is not None:
            lines.append("reduced matrix Pbar:")
            lines += ["  " + _row(r) for r in red["Pbar"]]
            lines.append("row partition tau: " + " ".join(_set(b) for b in red["tau"])
                         + "   gamma' = (" + ", ".join(red["gamma_prime"]) + ")")
            lines.append("column partition alpha: " + " ".join(_set(b) for b in red["alpha"])
                         + "   gamma = (" + ", ".join(red["gamma"]) + ")")
            lines.append("simplified matrix P:")
            lines += ["  " + _row(r) for r in red["P"]]
            lines.append(f"U1 = {_set(red['U1'])}  U2 = {_set(red['U2'])}")
        lines.append(f"forest: Pbar {_yn(inp['pbar_forest'])}, P {_yn(inp['p_forest'])}")
        for n, c in enumerate(self.certificates, 1):
            lines.append(f"certificate {n}:")
            lines.append("  sigma = " + " ".join(f"({a},{b})" for a, b in c["sigma"]))
            lines.append("  S = " + "; ".join(" ".join(f"{v:+d}" if v else " 0" for v in r) for r in c["S"]))
            for i, sets in enumerate(c["lambda_sets"], 1):
                if sets:
                    lines.append(f"  Lambda row {i}: " + ", ".join(f"{k}={_set(v)}" for k, v in sets.items()))
            for e in c["exclusion"]:
                lines.append(f"  D: {e}")
            lines.append("  outside D: " + (", ".join(c["not_D"]) or "always"))
            lines.append("  sign conditions: " + (", ".join(c["sign_conditions"]) or "none"))
            lines.append("  rho = (" + ", ".join(c["rho"]) + ")")
            lines.append("  delta = (" + ", ".join(c["delta"]) + ")  sign "
                         + str(tuple(c["delta_sign"])))
            lines.append("  z = (" + ", ".join(c["z"]) + ")")
            lines.append("  branch: " + " | ".join(c["branch_trace"]))
        w = self.witness
        if w is not None:
            labels = inp.get("rate_labels") or [f"kappa{k + 1}" for k in range(len(w["kappa"]))]
            names = inp.get("species") or [f"x{v + 1}" for v in range(len(w["x"]))]
            lines.append(f"witness ({w['precision']} bits):")
            for lab, val in zip(labels, w["kappa"]):
                lines.append(f"  {lab} = {_short(val)}")
            for nm, xv, yv in zip(names, w["x"], w["y"]):
                lines.append(f"  {nm}: x = {_short(xv)}   y = {_short(yv)}")
            if w["b"]:
                lines.append("  b = (" + ", ".join(_short(v) for v in w["b"]) + ")")
            lines.append("  residuals: " + ", ".join(f"{k}={v}" for k, v in w["residuals"].items())
                         + f"; separation={w['separation']}")
            ver = w.get("verification")
            if ver:
                lines.append(f"  verification at {ver['precision']} bits: "
                             + ("passed" if ver["passed"] else "FAILED"))
        st = self.stats
        lines.append("stats: " + ", ".join(f"{k}={v}" for k, v in st.items())
                     + f", wall_time={self.wall_time:.3f}s")
        return "\n".join(lines) + "\n"


def _row(r) -> str:
    return "  ".join(f"{v:>5}" for v in r)


def _set(b) -> str:
    return "{" + ",".join(str(i) for i in b) + "}"


def _yn(v) -> str:
    return {True: "yes", False: "no", None: "n/a"}[v]


def _short(s: str) -> str:
    return mpmath.nstr(mpf(s), 15)
