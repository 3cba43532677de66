"""Relativistic test electrons in the knot field.

Times are measured in units of l0/c, positions in l0, velocities in c, so
the equation of motion collapses to a single dimensionless coupling g. The
sign conventions are those of an electron (negative charge): at rest at the
origin at time zero the acceleration is along -x.

The primary state variable is the velocity. A momentum-form fixed-step RK4
integrator is kept alongside as an independent cross-check; it shares
nothing with the adaptive stepper except the field evaluator.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import constants
from . import knot_fields
from ._backend import kernels

INITIAL_STEP = 1e-3
RECORD_CAP = 262144


class SuperluminalError(RuntimeError):
    """A particle state reached or exceeded the speed of light."""


class StepSizeError(RuntimeError):
    """The adaptive step collapsed below time resolution."""


@dataclass(frozen=True)
class ParticleState:
    """Position (units of l0) and velocity (units of c) of one electron."""
    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=np.float64).reshape(3).copy()
        vel = np.asarray(self.velocity, dtype=np.float64).reshape(3).copy()
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(vel))):
            raise ValueError("state components must be finite")
        if vel @ vel >= 1.0:
            raise SuperluminalError("|velocity| must be < 1 strictly")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "velocity", vel)

    @property
    def speed(self):
        return float(np.sqrt(self.velocity @ self.velocity))


@dataclass(frozen=True)
class PushConfig:
    """Integration window, coupling and step control for one push.

    output_stride None records every accepted step; a positive stride
    records dense-output samples at t_start + k*stride plus the endpoint.
    t_end < t_start integrates backward (used by the reversal checks).
    """
    g: float
    t_start: float = 0.0
    t_end: float = 1.5
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = math.inf
    output_stride: float = None

    def __post_init__(self):
        if self.g < 0.0:
            raise ValueError("coupling g must be nonnegative")
        if self.t_end == self.t_start:
            raise ValueError("integration window must have nonzero length")
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_step <= 0.0:
            raise ValueError("max_step must be positive")
        if self.output_stride is not None and self.output_stride <= 0.0:
            raise ValueError("output_stride must be positive or None")


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of one particle, time ordered.

    times run monotonically in the direction of integration and end at
    exactly the configured t_end (dense output, not nearest step).
    """
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    steps_taken: int
    steps_rejected: int

    @property
    def speeds(self):
        return np.sqrt(np.sum(self.velocities ** 2, axis=1))

    @property
    def final_state(self):
        return ParticleState(self.positions[-1], self.velocities[-1])

    @property
    def final_speed(self):
        v = self.velocities[-1]
        return float(np.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]))


@dataclass(frozen=True)
class EnsembleResult:
    """Outcome of independent pushes of many particles.

    final_speeds is aligned with the input state list; entries for failed
    particles are NaN and the failure text is kept in failures. v_min and
    v_max summarize the successful particles only.
    """
    trajectories: tuple
    final_speeds: np.ndarray
    v_min: float
    v_max: float
    failures: tuple


def lorentz_rhs(state, t, g):
    """Right hand side of the dimensionless equation of motion.

    Returns (dR/dT, dV/dT). The velocity form reads
    dV/dT = -g sqrt(1 - V^2) (e + V x b - V (V.e)); the last term is the
    work the field does on the particle, re-expressed through the speed.
    """
    v = np.asarray(state.velocity, dtype=np.float64)
    v2 = float(v @ v)
    if v2 >= 1.0:
        raise SuperluminalError("|velocity| must be < 1 strictly")
    sample = knot_fields.field_at(state.position, t)
    root = math.sqrt(1.0 - v2)
    force = sample.e + np.cross(v, sample.b) - v * float(v @ sample.e)
    return v.copy(), -g * root * force


def integrate_particle(state0, config):
    """Push one particle across the configured window.

    Adaptive embedded 5(4) pair with PI step control; the backend kernel
    does the stepping. Any stage that would leave the light cone rejects
    the step, so every recorded sample satisfies |V| < 1; if the step size
    collapses in the process the push aborts with StepSizeError rather
    than clamping the speed.
    """
    y0 = np.concatenate([state0.position, state0.velocity])
    if config.output_stride is None:
        per_step = 1
        t_out = np.empty(0, dtype=np.float64)
    else:
        per_step = 0
        span = config.t_end - config.t_start
        n = int(abs(span) / config.output_stride)
        sgn = 1.0 if span > 0 else -1.0
        ts = [config.t_start + sgn * k * config.output_stride
              for k in range(n + 1)]
        if abs(ts[-1] - config.t_end) > 1e-12 * max(1.0, abs(config.t_end)):
            ts.append(config.t_end)
        else:
            ts[-1] = config.t_end
        t_out = np.asarray(ts, dtype=np.float64)

    t_rec, y_rec, nstep, nrej, status, t_reached = kernels.particle_push(
        y0, config.t_start, config.t_end, config.g,
        config.rel_tol, config.abs_tol, INITIAL_STEP, config.max_step,
        t_out, per_step, RECORD_CAP)

    if status == 1:
        raise SuperluminalError("initial state rejected by the stepper")
    if status == 2:
        raise StepSizeError(
            "step size underflow at T=%.9g (speed likely approaching 1)"
            % t_reached)
    if status == 3:
        raise RuntimeError("step or record budget exhausted at T=%.9g"
                           % t_reached)
    return Trajectory(times=t_rec, positions=y_rec[:, :3],
                      velocities=y_rec[:, 3:], steps_taken=int(nstep),
                      steps_rejected=int(nrej))


def axes_ensemble():
    """The 60 standard initial states: at rest on the coordinate axes.

    Ten magnitudes 0.1 .. 1.0 on both sides of each axis. Ordering is
    x axis, then y, then z; within an axis by magnitude, positive first.
    """
    states = []
    zero = np.zeros(3)
    for axis in range(3):
        for tenth in range(1, 11):
            for sign in (1.0, -1.0):
                pos = np.zeros(3)
                pos[axis] = sign * tenth / 10.0
                states.append(ParticleState(pos, zero))
    return states


def run_ensemble(states, config, threads=1):
    """Integrate each state independently and collect final speeds.

    A failing particle does not abort the rest: its slot in trajectories
    is None, its final speed NaN, and the error text is recorded. Results
    do not depend on threads (the particles are independent and the
    output order follows the input order).
    """
    def push(state):
        try:
            return integrate_particle(state, config), None
        except Exception as exc:
            return None, "%s: %s" % (type(exc).__name__, exc)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(push, states))
    else:
        outcomes = [push(s) for s in states]

    trajectories = tuple(traj for traj, _ in outcomes)
    speeds = np.array([traj.final_speed if traj is not None else np.nan
                       for traj, _ in outcomes])
    failures = tuple((i, msg) for i, (_, msg) in enumerate(outcomes)
                     if msg is not None)
    good = speeds[np.isfinite(speeds)]
    if good.size == 0:
        raise RuntimeError("every particle failed: %s" % (failures,))
    return EnsembleResult(trajectories=trajectories, final_speeds=speeds,
                          v_min=float(good.min()), v_max=float(good.max()),
                          failures=failures)


def coupling_strength(energy_joules, l0_meters):
    """Dimensionless coupling of an electron to a knot of given scale.

    Evaluates (e / (pi m c)) * sqrt(mu0 * energy / (2 * l0)) with the
    CODATA constants; about 0.148 at one joule and one metre.
    """
    if energy_joules <= 0.0 or l0_meters <= 0.0:
        raise ValueError("energy and length scale must be positive")
    return (constants.ELEMENTARY_CHARGE
            / (math.pi * constants.ELECTRON_MASS * constants.SPEED_OF_LIGHT)
            * math.sqrt(constants.VACUUM_PERMEABILITY * energy_joules
                        / (2.0 * l0_meters)))


def momentum_rhs(position, momentum, t, g):
    """Equation of motion in momentum form, du/dT = -g (e + (u/gamma) x b).

    gamma = sqrt(1 + u^2) keeps the speed below 1 by construction, which
    is what makes this form a useful independent check of the velocity
    formulation near the light cone.
    """
    u = np.asarray(momentum, dtype=np.float64)
    gamma = math.sqrt(1.0 + float(u @ u))
    v = u / gamma
    sample = knot_fields.field_at(position, t)
    return v, -g * (sample.e + np.cross(v, sample.b))


def integrate_momentum_rk4(state0, config, n_steps):
    """Classic fixed-step RK4 in momentum variables; returns final state.

    Deliberately boring: no adaptivity, no dense output, a different state
    variable. Agreement with integrate_particle is a strong sign neither
    integrator is fooling itself.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    r = np.asarray(state0.position, dtype=np.float64).copy()
    v0 = np.asarray(state0.velocity, dtype=np.float64)
    u = v0 / math.sqrt(1.0 - float(v0 @ v0))
    h = (config.t_end - config.t_start) / n_steps
    t = config.t_start
    for _ in range(n_steps):
        kr1, ku1 = momentum_rhs(r, u, t, config.g)
        kr2, ku2 = momentum_rhs(r + 0.5 * h * kr1, u + 0.5 * h * ku1,
                                t + 0.5 * h, config.g)
        kr3, ku3 = momentum_rhs(r + 0.5 * h * kr2, u + 0.5 * h * ku2,
                                t + 0.5 * h, config.g)
        kr4, ku4 = momentum_rhs(r + h * kr3, u + h * ku3, t + h, config.g)
        r = r + (h / 6.0) * (kr1 + 2.0 * kr2 + 2.0 * kr3 + kr4)
        u = u + (h / 6.0) * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4)
        t += h
    gamma = math.sqrt(1.0 + float(u @ u))
    return ParticleState(r, u / gamma)
