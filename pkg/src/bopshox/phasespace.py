"""Phase-space trajectories of the slow BO wavefunction and shooting.

Projected onto channel n, the slow factor obeys the linear system

    phi'      = vartheta
    vartheta' = (-2 M (E - eps_n(y)) - beta_nn) phi

whose only fixed point is the origin. Where the bracket is negative the
field is elliptic (bound oscillation), where positive hyperbolic. Bound
states are recovered by integrating in from both decaying tails and
matching at y = 0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .bo import beta_diag, epsilon_n, omega1_tilde, omega2_tilde
from .errors import BracketFailure, NonConvergence, StepUnderflow
from .params import StateIndex, SystemParams

log = logging.getLogger(__name__)

OVERFLOW = 1e300


@dataclass(frozen=True)
class PhaseState:
    y: float
    phi: float
    vartheta: float


@dataclass(frozen=True)
class StepControl:
    """Fixed RK4 step with optional halving until doubling is converged."""

    h: float = 0.02
    rtol: float = 1e-8
    h_min: float = 1e-6
    adaptive: bool = True


@dataclass(frozen=True)
class Trajectory:
    """Dense integrated path. Samples are stored as arrays, y increasing."""

    n: int
    E: float
    y: np.ndarray
    phi: np.ndarray
    vartheta: np.ndarray
    h: float
    diverged: bool = False

    @property
    def samples(self) -> list[PhaseState]:
        return [PhaseState(float(a), float(b), float(c))
                for a, b, c in zip(self.y, self.phi, self.vartheta)]

    @property
    def node_count(self) -> int:
        return count_nodes(self.phi)

    @property
    def final(self) -> PhaseState:
        return PhaseState(float(self.y[-1]), float(self.phi[-1]), float(self.vartheta[-1]))


@dataclass(frozen=True)
class StabilityReport:
    y: float
    eig1: complex
    eig2: complex
    classification: str


def count_nodes(phi) -> int:
    s = np.sign(np.asarray(phi))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def field_coefficient(n, E, y, p: SystemParams, alpha_nn=0.0):
    """``alpha_nn^2 - 2 M (E - eps_n(y)) - beta_nn``; its sign decides stability."""
    return alpha_nn ** 2 - 2.0 * p.M * (E - epsilon_n(n, y, p)) - beta_diag(n, p)


def tangent_field(n, E, state: PhaseState, p: SystemParams, alpha_nn=0.0):
    """Right-hand side ``(dphi/dy, dvartheta/dy)``.

    A nonzero `alpha_nn` restores the Berry-connection terms of the general
    channel matrix; the real-valued channels here always have it zero.
    """
    k = -2.0 * p.M * (E - epsilon_n(n, state.y, p)) - beta_diag(n, p)
    return state.vartheta, k * state.phi - 2.0 * alpha_nn * state.vartheta


def channel_matrix(n, E, y, p: SystemParams, alpha_nn=0.0) -> np.ndarray:
    k = -2.0 * p.M * (E - epsilon_n(n, y, p)) - beta_diag(n, p)
    return np.array([[0.0, 1.0], [k, -2.0 * alpha_nn]])


def stability_eigenvalues(n, E, y, p: SystemParams, alpha_nn=0.0, atol=0.0) -> StabilityReport:
    """Eigenvalues ``-alpha_nn -+ sqrt(alpha_nn^2 - 2M(E - eps_n) - beta_nn)`` and their class."""
    disc = field_coefficient(n, E, y, p, alpha_nn)
    root = np.sqrt(complex(disc))
    eig1, eig2 = -alpha_nn - root, -alpha_nn + root
    if abs(disc) <= atol:
        kind = "parabolic"
    elif disc < 0:
        kind = "elliptic"
    else:
        kind = "hyperbolic"
    return StabilityReport(float(y), eig1, eig2, kind)


def turning_points(n, E, p: SystemParams):
    """Non-adiabatic turning points ``(y_minus, y_plus)``, or None if E is below the well."""
    radicand = 2.0 * (E - omega1_tilde(p) * (n + 0.5)) / (p.M * p.Omega ** 2 * (1.0 - p.delta ** 2))
    if radicand < 0:
        return None
    r = math.sqrt(radicand)
    return -r, r


def _rk4(y0, phi, th, h, n_steps, a0, a1, twoME, cap):
    # Linear field vartheta' = (a0 + a1 y^2 - 2ME) phi, written out for speed.
    ys = [y0]
    ps = [phi]
    ts = [th]
    half = 0.5 * h
    sixth = h / 6.0
    base = a0 - twoME
    diverged = False
    k_a = base + a1 * y0 * y0
    for i in range(n_steps):
        ym = y0 + (i + 0.5) * h
        ye = y0 + (i + 1) * h
        k_m = base + a1 * ym * ym
        k_e = base + a1 * ye * ye
        dt1 = k_a * phi
        p2 = phi + half * th
        t2 = th + half * dt1
        dt2 = k_m * p2
        p3 = phi + half * t2
        t3 = th + half * dt2
        dt3 = k_m * p3
        p4 = phi + h * t3
        t4 = th + h * dt3
        dt4 = k_e * p4
        phi = phi + sixth * (th + 2.0 * t2 + 2.0 * t3 + t4)
        th = th + sixth * (dt1 + 2.0 * dt2 + 2.0 * dt3 + dt4)
        k_a = k_e
        ys.append(ye)
        ps.append(phi)
        ts.append(th)
        if abs(phi) > cap or abs(th) > cap or phi != phi:
            diverged = True
            break
    return np.array(ys), np.array(ps), np.array(ts), diverged


def _integrate_fixed(n, E, y_start, y_end, init, h, p):
    n_steps = max(1, math.ceil((y_end - y_start) / h - 1e-9))
    h = (y_end - y_start) / n_steps
    # eps_n(y) = c0 + c1 y^2, so the bracket is a0 + a1 y^2 - 2 M E
    c0 = p.omega * (n + 0.5)
    c1 = 0.5 * (1.0 - p.delta ** 2) * p.M * p.Omega ** 2
    a0 = 2.0 * p.M * c0 - beta_diag(n, p)
    a1 = 2.0 * p.M * c1
    ys, ps, ts, diverged = _rk4(y_start, float(init.phi), float(init.vartheta),
                                h, n_steps, a0, a1, 2.0 * p.M * E, OVERFLOW)
    return Trajectory(n, E, ys, ps, ts, h, diverged)


def _step_matrices(n, E, y_start, n_steps, h, p):
    # Per-step RK4 propagators of the linear field, shape (n_steps, 2, 2).
    c1 = 0.5 * (1.0 - p.delta ** 2) * p.M * p.Omega ** 2
    base = 2.0 * p.M * (p.omega * (n + 0.5) - E) - beta_diag(n, p)
    y = y_start + h * np.arange(n_steps)
    ka = base + 2.0 * p.M * c1 * y * y
    km = base + 2.0 * p.M * c1 * (y + 0.5 * h) ** 2
    ke = base + 2.0 * p.M * c1 * (y + h) ** 2

    def field(k):
        A = np.zeros((n_steps, 2, 2))
        A[:, 0, 1] = 1.0
        A[:, 1, 0] = k
        return A

    eye = np.eye(2)
    K1 = field(ka)
    Am = field(km)
    K2 = Am @ (eye + 0.5 * h * K1)
    K3 = Am @ (eye + 0.5 * h * K2)
    K4 = field(ke) @ (eye + h * K3)
    return eye + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4)


def propagate(n, E, y_start, y_end, init: PhaseState, h, p: SystemParams) -> PhaseState:
    """End state of the fixed-step RK4 run, without the dense samples.

    Same arithmetic as `integrate` with a fixed step, but the step
    propagators are built as arrays and multiplied pairwise.
    """
    n_steps = max(1, math.ceil((y_end - y_start) / h - 1e-9))
    h = (y_end - y_start) / n_steps
    P = _step_matrices(n, E, y_start, n_steps, h, p)
    while len(P) > 1:
        if len(P) % 2:
            P = np.concatenate([P, np.eye(2)[None]])
        P = P[1::2] @ P[0::2]
    phi, th = P[0] @ np.array([init.phi, init.vartheta])
    return PhaseState(float(y_end), float(phi), float(th))


def _rel_change(a: Trajectory, b: Trajectory):
    fa, fb = a.final, b.final
    scale = max(abs(fa.phi), abs(fa.vartheta), abs(fb.phi), abs(fb.vartheta), 1e-300)
    return max(abs(fa.phi - fb.phi), abs(fa.vartheta - fb.vartheta)) / scale


def integrate(n, E, y_start, y_end, init: PhaseState, p: SystemParams,
              step_ctrl: StepControl = StepControl()) -> Trajectory:
    """Fixed-step RK4 from `y_start` to `y_end` with step-doubling control.

    With ``step_ctrl.adaptive`` the step is halved until halving once more
    changes the end state by less than ``rtol`` (relative); the finer of the
    last two runs is returned. A run whose state exceeds 1e300 stops early and
    is flagged ``diverged``.
    """
    if not y_start < y_end:
        raise ValueError("integration needs y_start < y_end")
    h = min(step_ctrl.h, y_end - y_start)
    coarse = _integrate_fixed(n, E, y_start, y_end, init, h, p)
    if not step_ctrl.adaptive:
        return coarse
    while True:
        h = 0.5 * coarse.h
        if h < step_ctrl.h_min:
            raise StepUnderflow(f"step fell below {step_ctrl.h_min} without converging")
        fine = _integrate_fixed(n, E, y_start, y_end, init, h, p)
        if coarse.diverged or fine.diverged:
            if fine.diverged and coarse.diverged:
                return fine
        elif _rel_change(coarse, fine) < step_ctrl.rtol:
            return fine
        coarse = fine


def domain_half_width(n, E, p: SystemParams) -> float:
    """Half-width of the shooting domain, well into the hyperbolic tails."""
    tp = turning_points(n, E, p)
    y_plus = tp[1] if tp else 0.0
    return 2.0 * y_plus + 5.0 / math.sqrt(p.M * omega2_tilde(p))


def _tail_init(n, E, Y, p):
    # Start on the decaying branch, phi ~ exp(kappa y) as y -> -infinity.
    k = field_coefficient(n, E, -Y, p)
    kappa = math.sqrt(k) if k > 0 else 0.0
    return PhaseState(-Y, 1e-100, kappa * 1e-100)


@dataclass(frozen=True)
class _Shot:
    mismatch: float
    left: Trajectory


def _mismatch(n, E, Y, h, p) -> float:
    end = propagate(n, E, -Y, 0.0, _tail_init(n, E, Y, p), h, p)
    fl, tl = end.phi, end.vartheta
    if not (math.isfinite(fl) and math.isfinite(tl)):
        raise NonConvergence(f"left integration diverged at E={E!r}")
    # eps_n is even in y, so the right-hand solution is the mirror image:
    # phi_R(0) = phi_L(0), vartheta_R(0) = -vartheta_L(0).
    fr, tr = fl, -tl
    sl, sr = math.hypot(fl, tl), math.hypot(fr, tr)
    return (fl / sl) * (tr / sr) - (tl / sl) * (fr / sr)


def matched_trajectory(n, E, Y, h, p: SystemParams) -> Trajectory:
    """Left and mirrored right solutions joined at y = 0 (least-squares scale)."""
    left = _integrate_fixed(n, E, -Y, 0.0, _tail_init(n, E, Y, p), h, p)
    if left.diverged:
        raise NonConvergence(f"left integration diverged at E={E!r}")
    fl, tl = left.phi[-1], left.vartheta[-1]
    fr, tr = fl, -tl
    c = (fl * fr + tl * tr) / (fr * fr + tr * tr)
    y = np.concatenate([left.y, -left.y[-2::-1]])
    phi = np.concatenate([left.phi, c * left.phi[-2::-1]])
    th = np.concatenate([left.vartheta, -c * left.vartheta[-2::-1]])
    scale = np.max(np.abs(phi))
    return Trajectory(n, E, y, phi / scale, th / scale, left.h)


def choose_step(n, E, Y, p: SystemParams, step_ctrl: StepControl = StepControl()) -> float:
    """Step for which halving changes the left end state at y = 0 by < rtol."""
    init = _tail_init(n, E, Y, p)
    h = min(step_ctrl.h, Y)
    coarse = propagate(n, E, -Y, 0.0, init, h, p)
    while True:
        h *= 0.5
        if h < step_ctrl.h_min:
            raise StepUnderflow(f"step fell below {step_ctrl.h_min} without converging")
        fine = propagate(n, E, -Y, 0.0, init, h, p)
        scale = max(abs(fine.phi), abs(fine.vartheta))
        if max(abs(fine.phi - coarse.phi), abs(fine.vartheta - coarse.vartheta)) < step_ctrl.rtol * scale:
            return h
        coarse = fine


def shoot_eigenvalue(n, l, p: SystemParams, bracket=None, tol=1e-10, max_iter=200,
                     step_ctrl: StepControl = StepControl(), return_trajectory=False):
    """BO eigenvalue of channel n with l nodes, by two-sided shooting.

    The mismatch is the normalized Wronskian of the two tail solutions at
    y = 0; it changes sign at each eigenvalue. The root in `bracket` is
    found by Illinois false position with bisection fallback; the matched
    trajectory must then have exactly ``l`` nodes.

    The default bracket is the closed-form BO energy plus or minus half
    the slow BO frequency.
    """
    from .bo import bo_energy

    if bracket is None:
        E0 = bo_energy(p, StateIndex(n, l))
        half = 0.5 * omega2_tilde(p)
        bracket = (E0 - half, E0 + half)
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise BracketFailure(f"empty bracket {bracket!r}")
    Y = domain_half_width(n, hi, p)
    h = choose_step(n, 0.5 * (lo + hi), Y, p, step_ctrl)
    f_lo = _mismatch(n, lo, Y, h, p)
    f_hi = _mismatch(n, hi, Y, h, p)
    if f_lo == 0.0:
        hi, f_hi = lo, f_lo
    elif f_hi == 0.0:
        lo, f_lo = hi, f_hi
    elif (f_lo > 0) == (f_hi > 0):
        raise BracketFailure(f"no sign change of the mismatch on [{lo!r}, {hi!r}]")

    # Illinois false position; a plain bisection step is forced whenever two
    # consecutive steps failed to halve the bracket.
    side = 0
    it = 0
    widths = [hi - lo]
    while hi - lo > tol * max(abs(lo), abs(hi)):
        it += 1
        if it > max_iter:
            raise NonConvergence(f"no convergence after {max_iter} iterations")
        E = 0.5 * (lo + hi)
        stalled = len(widths) > 2 and widths[-1] > 0.5 * widths[-3]
        if not stalled:
            E_fp = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
            if lo < E_fp < hi:
                E = E_fp
        f = _mismatch(n, E, Y, h, p)
        if f == 0.0:
            lo = hi = E
            break
        if (f > 0) == (f_lo > 0):
            lo, f_lo = E, f
            if side == -1:
                f_hi *= 0.5
            side = -1
        else:
            hi, f_hi = E, f
            if side == 1:
                f_lo *= 0.5
            side = 1
        widths.append(hi - lo)
    E = 0.5 * (lo + hi)
    traj = matched_trajectory(n, E, Y, h, p)
    if traj.node_count != l:
        raise NonConvergence(
            f"converged to E={E!r} with {traj.node_count} nodes, expected {l}")
    log.debug("shoot n=%d l=%d E=%.15g iterations=%d h=%g", n, l, E, it, h)
    if return_trajectory:
        return E, traj
    return E
