"""Pure-drag shuttlecock flight.

The lumped model a = (0, 0, -g) - (g / v_t^2) |v| v is integrated with
classical fourth-order Runge-Kutta. Positions and velocities are plain
float tuples; z is height above the court.
"""

from __future__ import annotations

import math

import structlog

from shuttlesense.errors import BadParameter, NoLanding
from shuttlesense.types import DragParams, ShuttleState

log = structlog.get_logger()

Vec3 = tuple[float, float, float]


def acceleration(velocity: Vec3, params: DragParams) -> Vec3:
    vx, vy, vz = velocity
    k = params.g / (params.terminal_velocity * params.terminal_velocity) * math.sqrt(vx * vx + vy * vy + vz * vz)
    return (-k * vx, -k * vy, -params.g - k * vz)


def _axpy(a: float, x: Vec3, y: Vec3) -> Vec3:
    return (y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2])


def step_rk4(state: ShuttleState, params: DragParams, dt: float) -> ShuttleState:
    if dt <= 0:
        raise BadParameter(f"dt must be > 0, got {dt}")
    p, v = state.position, state.velocity

    k1p, k1v = v, acceleration(v, params)
    v2 = _axpy(0.5 * dt, k1v, v)
    k2p, k2v = v2, acceleration(v2, params)
    v3 = _axpy(0.5 * dt, k2v, v)
    k3p, k3v = v3, acceleration(v3, params)
    v4 = _axpy(dt, k3v, v)
    k4p, k4v = v4, acceleration(v4, params)

    position = tuple(p[i] + dt / 6.0 * (k1p[i] + 2 * k2p[i] + 2 * k3p[i] + k4p[i]) for i in range(3))
    velocity = tuple(v[i] + dt / 6.0 * (k1v[i] + 2 * k2v[i] + 2 * k3v[i] + k4v[i]) for i in range(3))
    return ShuttleState(position=position, velocity=velocity)


def integrate(state: ShuttleState, params: DragParams, dt: float, duration: float) -> ShuttleState:
    """Fixed-step propagation over `duration` seconds, ground ignored."""
    for _ in range(int(round(duration / dt))):
        state = step_rk4(state, params, dt)
    return state


def simulate_to_landing(
    initial: ShuttleState,
    params: DragParams = DragParams(),
    dt: float = 0.001,
    t_max: float = 10.0,
) -> tuple[tuple[float, float], float]:
    """Integrate until z crosses 0; return the landing (x, y) and flight time.

    The crossing is located by linear interpolation inside the final step.
    """
    if initial.position[2] <= 0:
        raise BadParameter(f"initial height must be > 0, got {initial.position[2]}")
    if dt <= 0:
        raise BadParameter(f"dt must be > 0, got {dt}")

    state = initial
    for n in range(int(math.ceil(t_max / dt))):
        nxt = step_rk4(state, params, dt)
        z0, z1 = state.position[2], nxt.position[2]
        if z1 <= 0:
            frac = z0 / (z0 - z1)
            x = state.position[0] + frac * (nxt.position[0] - state.position[0])
            y = state.position[1] + frac * (nxt.position[1] - state.position[1])
            return (x, y), (n + frac) * dt
        state = nxt
    raise NoLanding(t_max)


def sample_flight(
    initial: ShuttleState,
    frame_dt: float,
    params: DragParams = DragParams(),
    dt: float = 0.001,
    t_max: float = 10.0,
) -> tuple[list[Vec3], tuple[float, float], float]:
    """Positions at multiples of `frame_dt` while airborne, plus the landing.

    Each frame interval is split into equal RK4 substeps no longer than `dt`.
    """
    substeps = max(1, int(math.ceil(frame_dt / dt - 1e-9)))
    h = frame_dt / substeps
    landing, flight_time = simulate_to_landing(initial, params, dt, t_max)

    samples: list[Vec3] = [initial.position]
    state = initial
    for _ in range(int(math.floor(flight_time / frame_dt))):
        for _ in range(substeps):
            state = step_rk4(state, params, h)
        if state.position[2] <= 0:
            break
        samples.append(state.position)
    return samples, landing, flight_time
