"""Scenario descriptors and construction of normalized automorphisms.

A scenario gives a classical group, an order m, a signed cycle type
(covering all torus coordinates), an outer flag, and optionally explicit
torus entries as powers of the fixed 2m-th root of unity.  The builder
produces the monomial matrix n_w in the case normal form: entries 1
except for the per-cycle corrections that pin the determinant and the
sign of the distinguished power.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .classical import GroupType, WeylElement, GroupError, identity_weyl, in_group
from .field import PrimeField, choose_field, root_of_unity
from .grading import AutomorphismSpec, SpecError, classify_case, dtheta_operator, order_of, compute_grading


@dataclass
class Scenario:
    group: str  # "SL" | "GL" | "SO" | "Sp"
    size: int  # matrix size as written in the group symbol
    m: int
    cycles: list  # [(length, "+"|"-"), ...] covering the rank
    outer: bool = False
    case: str | None = None
    sign: str | None = None  # "+I" | "-I" preference where the case leaves a choice
    torus_part: list | None = None  # exponents of xi per coordinate
    prime: int | None = None
    seed: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        try:
            cycles = [(int(l), s) for l, s in d.get("cycles", [])]
        except (TypeError, ValueError) as exc:
            raise SpecError(f"malformed cycles field: {exc}")
        sc = cls(
            group=d["type"],
            size=int(d["n"]),
            m=int(d["m"]),
            cycles=cycles,
            outer=bool(d.get("outer", False)),
            case=d.get("case"),
            sign=d.get("sign"),
            torus_part=d.get("torus_part"),
            prime=d.get("prime"),
            seed=int(d.get("seed", 1)),
        )
        sc.validate()
        return sc

    def to_dict(self) -> dict:
        out = {
            "type": self.group,
            "n": self.size,
            "m": self.m,
            "cycles": [[l, s] for l, s in self.cycles],
            "outer": self.outer,
            "seed": self.seed,
        }
        if self.case:
            out["case"] = self.case
        if self.sign:
            out["sign"] = self.sign
        if self.torus_part is not None:
            out["torus_part"] = list(self.torus_part)
        if self.prime is not None:
            out["prime"] = self.prime
        return out

    @property
    def gt(self) -> GroupType:
        return GroupType.from_name(self.group, self.size)

    def validate(self):
        gt = self.gt  # raises GroupError on bad family/size
        if self.m < 1:
            raise SpecError("m must be >= 1")
        total = sum(l for l, _ in self.cycles)
        if total != gt.n:
            raise SpecError(f"cycle lengths sum to {total}, expected rank {gt.n}")
        for l, s in self.cycles:
            if s not in ("+", "-"):
                raise SpecError(f"bad cycle sign {s!r}")
            if l < 1:
                raise SpecError("cycle lengths must be positive")
            if s == "-" and not gt.signed:
                raise SpecError("negative cycles require SO/Sp")
        if self.outer and gt.family not in ("SL", "GL"):
            raise SpecError("outer scenarios require SL/GL")
        if self.outer and self.m % 2:
            raise SpecError("outer scenarios have even m")
        if self.torus_part is not None and len(self.torus_part) != gt.n:
            raise SpecError("torus_part must list one exponent per coordinate")

    def describe(self) -> str:
        cyc = "".join(
            f"({l}{'+' if s == '+' else '-'})" for l, s in self.cycles
        )
        tag = "outer" if self.outer else "inner"
        return f"{self.group}({self.size}) m={self.m} {tag} {cyc}"


def weyl_from_cycles(gt: GroupType, cycles) -> tuple[WeylElement, list]:
    """Weyl element placing the cycles on consecutive coordinates, and the
    list of coordinate tuples, one per cycle."""
    images = [0] * gt.n
    placed = []
    pos = 1
    for length, sign in cycles:
        coords = list(range(pos, pos + length))
        for k in range(length - 1):
            images[coords[k] - 1] = coords[k + 1]
        images[coords[-1] - 1] = -coords[0] if sign == "-" else coords[0]
        placed.append((tuple(coords), sign))
        pos += length
    return WeylElement(images), placed


def _inner_entry_plan(gt: GroupType, cycles, m, F):
    """Entry (torus_part) per coordinate for the normalized inner lift:
    all ones except the closing entry of each maximal cycle."""
    p = F.p
    n = gt.n
    entries = [1] * n
    maximal_pos = [(c, s) for c, s in cycles if s == "+" and c == m and m > 1]
    r = len(maximal_pos)
    if gt.family in ("SL", "GL"):
        # close each m-cycle with pi so n_w^m = pi*I on the moved part and det = 1
        if m % 2 == 0 and r % 2 == 1:
            pi = p - 1
        else:
            pi = 1
        pos = 1
        for length, sign in cycles:
            if sign == "+" and length == m and m > 1:
                entries[pos + length - 2] = pi
            pos += length
        return entries
    # SO/Sp positive maximal cycles: pi = -1 for SO_even with even m (case 2II),
    # +1 otherwise; negative cycles need no correction.
    pi = p - 1 if (gt.family == "SO_even" and m % 2 == 0) else 1
    pos = 1
    for length, sign in cycles:
        if sign == "+" and length == m and m > 1:
            entries[pos + length - 2] = pi
        pos += length
    return entries


def build_nw(gt: GroupType, scenario: Scenario, F: PrimeField):
    """Monomial matrix n_w in the case normal form."""
    p = F.p
    m = scenario.m
    w, placed = weyl_from_cycles(gt, scenario.cycles)
    xi = root_of_unity(F, 2 * m) if (p - 1) % (2 * m) == 0 else None
    if scenario.outer:
        return _build_outer_nw(gt, scenario, w, F), w
    entries = _inner_entry_plan(gt, scenario.cycles, m, F)
    if scenario.torus_part is not None:
        if xi is None:
            raise SpecError("torus_part needs a 2m-th root of unity in the field")
        for i, e in enumerate(scenario.torus_part):
            entries[i] = entries[i] * pow(xi, int(e) % (2 * m), p) % p
    if gt.family in ("SL", "GL"):
        from .classical import lift_weyl

        return lift_weyl(gt, w, entries, F), w
    from .classical import lift_weyl, LiftError

    if gt.family == "SO_odd":
        for middle in (1, -1):
            try:
                return lift_weyl(gt, w, entries, F, middle_sign=middle), w
            except LiftError:
                continue
        raise SpecError("no SO(2n+1) lift with the normalized entries")
    return lift_weyl(gt, w, entries, F), w


def _build_outer_nw(gt: GroupType, scenario: Scenario, w: WeylElement, F: PrimeField):
    """Outer SL normal forms.

    4I  (m/2 odd, (m/2)-cycles):   permutation matrix, entries 1.
    4II (m/2 odd, m-cycles):       last entry of each cycle -1.
    4III sign +I (m/2 even):       uniform entries xi (a 2m-th root).
    4III sign -I (m/2 even):       last entry of each cycle -1.
    """
    p = F.p
    m = scenario.m
    n = gt.n
    if any(s == "-" for _, s in scenario.cycles):
        raise SpecError("outer scenarios use plain cycles")
    lengths = sorted({l for l, _ in scenario.cycles if l > 1})
    half = m // 2
    entries = [1] * n
    want_sign = scenario.sign or ("+I" if scenario.case in (None, "4I", "4III") else "-I")
    if half % 2 == 1:
        if lengths and lengths != [half] and lengths != [m]:
            raise SpecError("outer cycles must have length m or m/2")
        if lengths == [m] or want_sign == "-I":
            # 4II: close each m-cycle with -1
            pos = 1
            for length, sign in scenario.cycles:
                if length == m:
                    entries[pos + length - 2] = p - 1
                pos += length
    else:
        if lengths and lengths != [m]:
            raise SpecError("outer cycles must have length m when m/2 is even")
        if want_sign == "+I":
            xi = root_of_unity(F, 2 * m)
            entries = [xi] * n
        else:
            pos = 1
            for length, sign in scenario.cycles:
                if length == m:
                    entries[pos + length - 2] = p - 1
                pos += length
    M = np.zeros((n, n), dtype=np.int64)
    for i in range(1, n + 1):
        M[w(i) - 1, i - 1] = entries[i - 1]
    det = _det(M, p)
    if det != 1:
        raise SpecError(f"outer normal form has determinant {det}; unsupported padding")
    return M


def _det(M, p):
    from .classical import _det_mod

    return _det_mod(M, p)


@dataclass
class Session:
    """Everything the pipeline derives from a scenario."""

    scenario: Scenario
    gt: GroupType
    F: PrimeField
    alg: object
    spec: AutomorphismSpec
    w: WeylElement
    operator: np.ndarray
    grading: object
    case: str
    zeta: int
    xi: int


def open_session(scenario: Scenario) -> Session:
    from .classical import build_algebra

    gt = scenario.gt
    m = scenario.m
    if scenario.prime is not None:
        F = PrimeField(scenario.prime)
        if (F.p - 1) % (2 * m) != 0 or F.p <= 2 * gt.N:
            raise SpecError(f"prime override {F.p} violates the field constraints")
        if gt.family == "SL" and gt.N % F.p == 0:
            raise SpecError(f"prime override {F.p} divides n")
    else:
        F = choose_field(gt, gt.N, m)
    alg = build_algebra(gt, F)
    kind = "outer" if scenario.outer else "inner"
    n_w, w = build_nw(gt, scenario, F)
    spec = AutomorphismSpec(gt, kind, n_w, m)
    op = dtheta_operator(spec, alg)
    order = order_of(op, F.p, 4 * gt.N)
    if order != m:
        raise SpecError(f"constructed automorphism has order {order}, scenario declares {m}")
    grading = compute_grading(op, m, F, alg)
    case = classify_case(gt, spec, F.p)
    if scenario.case and scenario.case != case:
        raise SpecError(f"scenario declares case {scenario.case} but classification gives {case}")
    zeta = grading.zeta
    xi = root_of_unity(F, 2 * m) if (F.p - 1) % (2 * m) == 0 else zeta
    return Session(scenario, gt, F, alg, spec, w, op, grading, case, zeta, xi)


def load_scenario(path_or_dict) -> Scenario:
    if isinstance(path_or_dict, dict):
        return Scenario.from_dict(path_or_dict)
    with open(path_or_dict, "r", encoding="utf-8") as fh:
        return Scenario.from_dict(json.load(fh))
