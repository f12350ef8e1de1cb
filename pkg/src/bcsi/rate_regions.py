"""Achievable-rate and capacity regions for the five-message setup.

Receiver 1 requests (M1, M2, M4) and already knows M5; receiver 2 requests
(M1, M3, M5) and knows M4. The general inner bound is parameterized by a
joint p(u0, u1, u2) and a map x = gamma(u0, u1, u2); its five inequalities
come from mutual covering plus packing at both receivers, and this module
also reproduces the pre-projection conditions in split-rate variables and
projects them back down, which must land on the same region.

For deterministic channels and more-capable channels the inner bound is
tight and the closed-form regions are built directly from p(u, x).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import polytope
from .classifier import is_deterministic
from .errors import InputError
from .info_measures import conditional_mutual_information, entropy, mutual_information
from .polytope import (LinearInequality, LinearSystem, RateRegion, RATE_VARS,
                       fme_eliminate, remove_redundant)
from .probability import (Alphabet, AuxScheme, Channel, JointPmf, induced_joint)

SPLIT_VARS = ("R1", "R21", "R22", "R31", "R32", "R4", "R5", "Rp1", "Rp2")
ELIMINATION_ORDER = ("Rp1", "Rp2", "R21", "R22", "R31", "R32")


@dataclass(frozen=True)
class SplitRates:
    """Operating point in split-rate coordinates. R2 = r21 + r22 and
    R3 = r31 + r32 by construction; rp1/rp2 are the bin rates."""

    r1: float = 0.0
    r21: float = 0.0
    r22: float = 0.0
    r31: float = 0.0
    r32: float = 0.0
    r4: float = 0.0
    r5: float = 0.0
    rp1: float = 0.0
    rp2: float = 0.0

    def __post_init__(self):
        for name in ("r1", "r21", "r22", "r31", "r32", "r4", "r5", "rp1", "rp2"):
            if getattr(self, name) < 0:
                raise InputError(f"split rate {name} is negative")

    @property
    def r2(self) -> float:
        return self.r21 + self.r22

    @property
    def r3(self) -> float:
        return self.r31 + self.r32


@dataclass(frozen=True)
class MiConstants:
    """The five information quantities that bound the inner-bound region."""

    i_u0u1_y1: float
    i_u0u2_y2: float
    i_u1_y1_given_u0: float
    i_u2_y2_given_u0: float
    i_u1_u2_given_u0: float


def mi_constants(scheme: AuxScheme, ch: Channel) -> MiConstants:
    j = induced_joint(scheme, ch)
    return MiConstants(
        i_u0u1_y1=mutual_information(j, ("U0", "U1"), ("Y1",)),
        i_u0u2_y2=mutual_information(j, ("U0", "U2"), ("Y2",)),
        i_u1_y1_given_u0=conditional_mutual_information(j, ("U1",), ("Y1",), ("U0",)),
        i_u2_y2_given_u0=conditional_mutual_information(j, ("U2",), ("Y2",), ("U0",)),
        i_u1_u2_given_u0=conditional_mutual_information(j, ("U1",), ("U2",), ("U0",)),
    )


def _ineq(coeffs: dict, rhs: float) -> LinearInequality:
    return LinearInequality({v: Fraction(c) for v, c in coeffs.items()}, rhs)


def marton_region(scheme: AuxScheme, ch: Channel) -> RateRegion:
    """The five-inequality inner bound for a fixed auxiliary scheme."""
    c = mi_constants(scheme, ch)
    rows = [
        _ineq({"R1": 1, "R2": 1, "R4": 1}, c.i_u0u1_y1),
        _ineq({"R1": 1, "R3": 1, "R5": 1}, c.i_u0u2_y2),
        _ineq({"R1": 1, "R2": 1, "R3": 1, "R4": 1},
              c.i_u0u1_y1 + c.i_u2_y2_given_u0 - c.i_u1_u2_given_u0),
        _ineq({"R1": 1, "R2": 1, "R3": 1, "R5": 1},
              c.i_u0u2_y2 + c.i_u1_y1_given_u0 - c.i_u1_u2_given_u0),
        _ineq({"R1": 2, "R2": 1, "R3": 1, "R4": 1, "R5": 1},
              c.i_u0u1_y1 + c.i_u0u2_y2 - c.i_u1_u2_given_u0),
    ]
    return RateRegion(LinearSystem(RATE_VARS, rows),
                      provenance={"kind": "t1", "aux_sizes": list(scheme.sizes)})


def raw_coding_system(consts: MiConstants, u2_trivial: bool = False) -> LinearSystem:
    """Pre-projection achievability conditions over the split-rate variables.

    One covering condition (encoded in <= form by negation), two per-receiver
    packing pairs, and nonnegativity for all nine variables. With a trivial
    U2 the split of M3 collapses and the first bin is unused, which pins
    R32 = 0 and Rp1 = 0.
    """
    rows = [
        _ineq({"Rp1": -1, "Rp2": -1}, -consts.i_u1_u2_given_u0),
        _ineq({"R22": 1, "Rp1": 1}, consts.i_u1_y1_given_u0),
        _ineq({"R1": 1, "R21": 1, "R31": 1, "R4": 1, "R22": 1, "Rp1": 1},
              consts.i_u0u1_y1),
        _ineq({"R32": 1, "Rp2": 1}, consts.i_u2_y2_given_u0),
        _ineq({"R1": 1, "R21": 1, "R31": 1, "R5": 1, "R32": 1, "Rp2": 1},
              consts.i_u0u2_y2),
    ]
    for v in SPLIT_VARS:
        rows.append(_ineq({v: -1}, 0.0))
    if u2_trivial:
        rows.append(_ineq({"R32": 1}, 0.0))
        rows.append(_ineq({"Rp1": 1}, 0.0))
    return LinearSystem(SPLIT_VARS, rows)


def project_raw_system(sys: LinearSystem, box=None) -> RateRegion:
    """Substitute R2 = R21 + R22 and R3 = R31 + R32 (as opposing inequality
    pairs), eliminate the six auxiliary rate variables, and redundancy-clean
    the projection over the default rate box."""
    variables = tuple(sys.variables) + ("R2", "R3")
    rows = list(sys.inequalities)
    rows.append(_ineq({"R21": 1, "R22": 1, "R2": -1}, 0.0))
    rows.append(_ineq({"R2": 1, "R21": -1, "R22": -1}, 0.0))
    rows.append(_ineq({"R31": 1, "R32": 1, "R3": -1}, 0.0))
    rows.append(_ineq({"R3": 1, "R31": -1, "R32": -1}, 0.0))
    work = LinearSystem(variables, rows)
    for var in ELIMINATION_ORDER:
        work = fme_eliminate(work, var)
    reduced = remove_redundant(LinearSystem(RATE_VARS, work.inequalities), box)
    return RateRegion(reduced, provenance={"kind": "t1-projection"})


def channel_joint(p_ux: JointPmf, ch: Channel) -> JointPmf:
    """Joint over (U, X, Y1, Y2) from p(u, x) and the channel kernel."""
    if len(p_ux.axes) != 2:
        raise InputError("expected a two-axis joint p(u, x)")
    if p_ux.axes[1].size != ch.x.size:
        raise InputError("p(u, x) input alphabet does not match the channel")
    exact = p_ux.exact and ch.exact
    ux = p_ux.mass if exact else p_ux.as_float()
    kern = ch.kernel if exact else ch.kernel_float()
    mass = ux[..., None, None] * kern[None, ...]
    axes = (Alphabet(p_ux.axes[0].name if p_ux.axes[0].name != "X" else "U",
                     p_ux.axes[0].symbols),
            ch.x, ch.y1, ch.y2)
    return JointPmf(axes, np.array(mass, dtype=object if exact else np.float64))


def deterministic_region(p_ux: JointPmf, ch: Channel) -> RateRegion:
    """Capacity region formula for channels whose outputs are functions of
    the input, evaluated at one p(u, x)."""
    verdict = is_deterministic(ch)
    if not verdict.holds:
        raise InputError("channel is not deterministic")
    j = channel_joint(p_ux, ch)
    uname = j.axes[0].name
    h_y1 = entropy(j.marginal(("Y1",)))
    h_y2 = entropy(j.marginal(("Y2",)))
    h_u_y1 = entropy(j.marginal((uname, "Y1")))
    h_u_y2 = entropy(j.marginal((uname, "Y2")))
    h_u_y1_y2 = entropy(j.marginal((uname, "Y1", "Y2")))
    h_u = entropy(j.marginal((uname,)))
    h_y2_given_uy1 = h_u_y1_y2 - h_u_y1
    h_y1_given_uy2 = h_u_y1_y2 - h_u_y2
    i_u_y1 = h_u + h_y1 - h_u_y1
    rows = [
        _ineq({"R1": 1, "R2": 1, "R4": 1}, h_y1),
        _ineq({"R1": 1, "R3": 1, "R5": 1}, h_y2),
        _ineq({"R1": 1, "R2": 1, "R3": 1, "R4": 1}, h_y1 + h_y2_given_uy1),
        _ineq({"R1": 1, "R2": 1, "R3": 1, "R5": 1}, h_y2 + h_y1_given_uy2),
        _ineq({"R1": 2, "R2": 1, "R3": 1, "R4": 1, "R5": 1},
              i_u_y1 + h_y2 + h_y1_given_uy2),
    ]
    return RateRegion(LinearSystem(RATE_VARS, rows), provenance={"kind": "t2"})


def more_capable_region(p_ux: JointPmf, ch: Channel) -> RateRegion:
    """Three-inequality region that is capacity for more-capable channels;
    an inner bound regardless of class."""
    j = channel_joint(p_ux, ch)
    uname = j.axes[0].name
    i_u_y2 = mutual_information(j, (uname,), ("Y2",))
    i_x_y1_given_u = conditional_mutual_information(j, ("X",), ("Y1",), (uname,))
    i_x_y1 = mutual_information(j, ("X",), ("Y1",))
    rows = [
        _ineq({"R1": 1, "R3": 1, "R5": 1}, i_u_y2),
        _ineq({"R1": 1, "R2": 1, "R3": 1, "R5": 1}, i_u_y2 + i_x_y1_given_u),
        _ineq({"R1": 1, "R2": 1, "R3": 1, "R4": 1}, i_x_y1),
    ]
    return RateRegion(LinearSystem(RATE_VARS, rows), provenance={"kind": "t3"})


def _trivial_alphabet(name: str) -> Alphabet:
    return Alphabet.indexed(name, 1)


def specialize_scheme(kind: str, base, ch: Channel) -> AuxScheme:
    """Build the auxiliary scheme matching a known specialization.

    kinds: complementary (U0 carries X, base = p(x)); degraded_rx1 /
    more_capable (U0, U1) = (U, X); degraded_rx2 with the receiver roles
    swapped; deterministic (U0, U1, U2) = (U, Y1, Y2) with gamma any input
    consistent with the output pair.
    """
    if kind == "complementary":
        px = base
        u0 = Alphabet("U0", px.alphabet.symbols)
        axes = (u0, _trivial_alphabet("U1"), _trivial_alphabet("U2"))
        mass = np.array(px.mass, dtype=px.mass.dtype).reshape(px.alphabet.size, 1, 1)
        gamma = np.arange(px.alphabet.size, dtype=np.int64).reshape(-1, 1, 1)
        return AuxScheme(JointPmf(axes, mass), gamma)

    if kind in ("degraded_rx1", "more_capable"):
        p_ux = base
        u_size, x_size = p_ux.axes[0].size, p_ux.axes[1].size
        axes = (Alphabet.indexed("U0", u_size), Alphabet.indexed("U1", x_size),
                _trivial_alphabet("U2"))
        mass = np.array(p_ux.mass, dtype=p_ux.mass.dtype).reshape(u_size, x_size, 1)
        gamma = np.tile(np.arange(x_size, dtype=np.int64).reshape(1, -1, 1), (u_size, 1, 1))
        return AuxScheme(JointPmf(axes, mass), gamma)

    if kind == "degraded_rx2":
        p_ux = base
        u_size, x_size = p_ux.axes[0].size, p_ux.axes[1].size
        axes = (Alphabet.indexed("U0", u_size), _trivial_alphabet("U1"),
                Alphabet.indexed("U2", x_size))
        mass = np.array(p_ux.mass, dtype=p_ux.mass.dtype).reshape(u_size, 1, x_size)
        gamma = np.tile(np.arange(x_size, dtype=np.int64).reshape(1, 1, -1), (u_size, 1, 1))
        return AuxScheme(JointPmf(axes, mass), gamma)

    if kind == "deterministic":
        p_ux = base
        verdict = is_deterministic(ch)
        if not verdict.holds:
            raise InputError("deterministic specialization needs a deterministic channel")
        phi1 = verdict.witness["phi1"]
        phi2 = verdict.witness["phi2"]
        u_size = p_ux.axes[0].size
        m1, m2 = ch.y1.size, ch.y2.size
        exact = p_ux.exact
        mass = np.zeros((u_size, m1, m2), dtype=object if exact else np.float64)
        if exact:
            mass[:] = Fraction(0)
        gamma = np.zeros((u_size, m1, m2), dtype=np.int64)
        # gamma on a realized output pair: lowest-index consistent input
        for y1i in range(m1):
            for y2i in range(m2):
                for xi in range(ch.x.size):
                    if phi1[xi] == y1i and phi2[xi] == y2i:
                        gamma[:, y1i, y2i] = xi
                        break
        for ui in range(u_size):
            for xi in range(ch.x.size):
                mass[ui, phi1[xi], phi2[xi]] += p_ux.mass[ui, xi]
        axes = (Alphabet.indexed("U0", u_size), Alphabet.indexed("U1", m1),
                Alphabet.indexed("U2", m2))
        return AuxScheme(JointPmf(axes, np.array(mass)), gamma)

    raise InputError(f"unknown specialization kind {kind!r}")
