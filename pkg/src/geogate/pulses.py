"""Pulse synthesis: envelopes, the three-interval geometric construction,
dynamical reference gates, the parametric two-qubit schedule, and the
closed-form target unitaries.

Schedules are sampled at midpoints: sample k of a segment holds the value at
t = (k + 1/2) dt, which keeps piecewise-constant propagation second order.
Envelope samples are Rabi rates (or frequency shifts, for z channels) in MHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .device import MHZ_TO_RAD_NS, ModulationParams
from .hilbert import SI, SX, SY, SZ

XY_CHANNELS = ("xy_a", "xy_b")
Z_CHANNELS = ("z_a", "z_b")


@dataclass(frozen=True)
class Envelope:
    dt: float
    samples: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", s)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not np.all(np.isfinite(s)):
            raise ValueError("envelope samples must be finite")

    @property
    def duration(self) -> float:
        return len(self.samples) * self.dt

    def integral_rad(self) -> float:
        """Area under the envelope converted to radians."""
        return MHZ_TO_RAD_NS * float(np.sum(self.samples)) * self.dt


@dataclass(frozen=True)
class PulseSegment:
    """One constant-phase interval: in-phase envelope, optional quadrature."""

    envelope: Envelope
    phase: float
    drag_coefficient: float = 0.0
    quadrature: Envelope | None = None
    area: float = 0.0  # cached integral of the in-phase envelope, radians

    def __post_init__(self) -> None:
        if self.quadrature is not None and len(self.quadrature.samples) != len(self.envelope.samples):
            raise ValueError("quadrature length must match the in-phase envelope")
        if abs(self.area - self.envelope.integral_rad()) > 1e-6:
            raise ValueError("cached segment area disagrees with the envelope integral")

    @property
    def duration(self) -> float:
        return self.envelope.duration

    def complex_samples(self) -> np.ndarray:
        """(I + iQ) e^{i phase} drive samples in MHz."""
        q = self.quadrature.samples if self.quadrature is not None else 0.0
        return (self.envelope.samples + 1j * q) * np.exp(1j * self.phase)


@dataclass(frozen=True)
class PulseSchedule:
    """Named channels of pulse segments, plus an injected static detuning."""

    channels: dict[str, tuple[PulseSegment, ...]]
    dt: float
    detuning_mhz: float = 0.0

    def __post_init__(self) -> None:
        durs = {name: sum(s.duration for s in segs)
                for name, segs in self.channels.items() if segs}
        if durs and (max(durs.values()) - min(durs.values())) > 1e-9:
            raise ValueError(f"channel durations differ: {durs}")
        for name in self.channels:
            if name not in XY_CHANNELS + Z_CHANNELS:
                raise ValueError(f"unknown channel {name!r}")

    @property
    def total_duration(self) -> float:
        return max((sum(s.duration for s in segs) for segs in self.channels.values()), default=0.0)

    def active_channels(self) -> list[str]:
        return [name for name, segs in self.channels.items() if segs]

    def channel_samples(self, name: str) -> np.ndarray:
        """Concatenated complex drive samples for one channel (MHz)."""
        segs = self.channels.get(name, ())
        if not segs:
            return np.zeros(0, dtype=complex)
        return np.concatenate([s.complex_samples() for s in segs])

    def n_samples(self) -> int:
        return int(round(self.total_duration / self.dt))


@dataclass(frozen=True)
class GateSpec:
    """Geometric gate parameters: polar/azimuthal axis angles and the loop phase."""

    theta: float
    gamma: float
    varphi: float
    config: str = "A"
    kind: str = "geometric"

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= math.pi + 1e-12:
            raise ValueError("theta must lie in [0, pi]")
        if self.config not in ("A", "B"):
            raise ValueError("config must be 'A' or 'B'")
        if self.kind not in ("geometric", "dynamical"):
            raise ValueError("kind must be 'geometric' or 'dynamical'")


def truncated_gaussian_drag(width_ns: float, area_rad: float, drag_coef: float,
                            anharm_mhz: float, dt: float) -> tuple[Envelope, Envelope]:
    """Truncated-Gaussian in-phase envelope plus its derivative quadrature.

    Gaussian of sigma = width/4 truncated at +-2 sigma, offset-subtracted so
    the edges land on zero; the amplitude solves the requested area exactly
    on the sampled grid. Quadrature is -drag_coef * dI/dt / alpha (angular),
    which suppresses leakage through the second level.
    """
    if width_ns <= 0:
        raise ValueError("width must be positive")
    n = max(1, int(round(width_ns / dt)))
    t = (np.arange(n) + 0.5) * dt
    sigma = width_ns / 4.0
    raw = np.exp(-0.5 * ((t - width_ns / 2.0) / sigma) ** 2) - math.exp(-2.0)
    amp = area_rad / (MHZ_TO_RAD_NS * float(np.sum(raw)) * dt)
    i_env = amp * raw
    q_env = -drag_coef * np.gradient(i_env, dt) / (MHZ_TO_RAD_NS * anharm_mhz)
    return Envelope(dt, i_env), Envelope(dt, q_env)


def _segment(width_ns: float, area_rad: float, phase: float, drag_coef: float,
             anharm_mhz: float, dt: float) -> PulseSegment:
    if area_rad < 1e-12 or width_ns < dt / 2:
        empty = Envelope(dt, np.zeros(0))
        return PulseSegment(empty, phase, drag_coef, None, 0.0)
    i_env, q_env = truncated_gaussian_drag(width_ns, area_rad, drag_coef, anharm_mhz, dt)
    return PulseSegment(i_env, phase, drag_coef, q_env, i_env.integral_rad())


def idle_schedule(duration_ns: float, dt: float = 0.05, channel: str = "xy_b") -> PulseSchedule:
    n = int(round(duration_ns / dt))
    seg = PulseSegment(Envelope(dt, np.zeros(n)), 0.0, 0.0, None, 0.0)
    return PulseSchedule({channel: (seg,)}, dt)


def geometric_single_qubit(spec: GateSpec, total_width_ns: float = 80.0, dt: float = 0.05,
                           drag_coef: float = 1.0, anharm_mhz: float = -190.0,
                           channel: str = "xy_b") -> PulseSchedule:
    """Three-interval geometric schedule with areas (theta, pi, pi - theta).

    Segment phases for configuration A are (varphi - pi/2, varphi + gamma + pi/2,
    varphi - pi/2); configuration B flips the middle phase to varphi + gamma - pi/2.
    Segment widths are proportional to area so all intervals share one peak
    Rabi rate.
    """
    if spec.kind != "geometric":
        raise ValueError("geometric_single_qubit requires a geometric gate spec")
    th, ga, ph = spec.theta, spec.gamma, spec.varphi
    areas = (th, math.pi, math.pi - th)
    mid = ph + ga + math.pi / 2 if spec.config == "A" else ph + ga - math.pi / 2
    phases = (ph - math.pi / 2, mid, ph - math.pi / 2)
    segs = []
    for area, phase in zip(areas, phases):
        width = total_width_ns * area / (2.0 * math.pi)
        segs.append(_segment(width, area, phase, drag_coef, anharm_mhz, dt))
    return PulseSchedule({channel: tuple(segs)}, dt)


def dynamical_single_qubit(rotation_angle: float, axis_phase: float, width_ns: float,
                           dt: float = 0.05, drag_coef: float = 1.0,
                           anharm_mhz: float = -190.0, channel: str = "xy_b") -> PulseSchedule:
    """Single resonant pulse: rotation angle equals the pulse area.

    Negative angles flip the drive phase by pi. The caller fixes the width;
    named_gate keeps the peak Rabi rate equal to the geometric gates' peak.
    """
    area = abs(rotation_angle)
    phase = axis_phase + (math.pi if rotation_angle < 0 else 0.0)
    seg = _segment(width_ns, area, phase, drag_coef, anharm_mhz, dt)
    return PulseSchedule({channel: (seg,)}, dt)


def concat_schedules(*scheds: PulseSchedule) -> PulseSchedule:
    """Sequential composition; all parts must share dt and channel set."""
    if not scheds:
        raise ValueError("nothing to concatenate")
    dt = scheds[0].dt
    names = set(scheds[0].channels)
    out: dict[str, tuple[PulseSegment, ...]] = {n: () for n in names}
    detuning = scheds[0].detuning_mhz
    for s in scheds:
        if abs(s.dt - dt) > 1e-12 or set(s.channels) != names:
            raise ValueError("schedules must share dt and channel names")
        if abs(s.detuning_mhz - detuning) > 1e-12:
            raise ValueError("schedules carry different injected detunings")
        for n in names:
            out[n] = out[n] + s.channels[n]
    return PulseSchedule(out, dt, detuning)


def merge_schedules(a: PulseSchedule, b: PulseSchedule) -> PulseSchedule:
    """Parallel composition on disjoint channels, idle-padded to equal length."""
    if abs(a.dt - b.dt) > 1e-12:
        raise ValueError("schedules must share dt")
    if set(a.channels) & set(b.channels):
        raise ValueError("parallel schedules must use disjoint channels")
    dur = max(a.total_duration, b.total_duration)
    chans: dict[str, tuple[PulseSegment, ...]] = {}
    for s in (a, b):
        for name, segs in s.channels.items():
            short = dur - sum(x.duration for x in segs)
            if short > 1e-9:
                pad = PulseSegment(Envelope(s.dt, np.zeros(int(round(short / s.dt)))), 0.0)
                segs = segs + (pad,)
            chans[name] = segs
    det = a.detuning_mhz if a.active_channels() else b.detuning_mhz
    return PulseSchedule(chans, a.dt, det)


def target_unitary(spec: GateSpec) -> np.ndarray:
    """Closed-form geometric gate: cos(gamma) I + i sin(gamma) (n . sigma)."""
    n = (math.sin(spec.theta) * math.cos(spec.varphi),
         math.sin(spec.theta) * math.sin(spec.varphi),
         math.cos(spec.theta))
    ndots = n[0] * SX + n[1] * SY + n[2] * SZ
    return math.cos(spec.gamma) * SI + 1j * math.sin(spec.gamma) * ndots


def _rot(axis_phase: float, angle: float) -> np.ndarray:
    ax = math.cos(axis_phase) * SX + math.sin(axis_phase) * SY
    return math.cos(angle / 2) * SI - 1j * math.sin(angle / 2) * ax


# theta, gamma, varphi for the named geometric gates (theta fixed at pi/2)
GEOMETRIC_ANGLES: dict[str, tuple[float, float, float]] = {
    "X": (math.pi / 2, math.pi / 2, 0.0),
    "Y": (math.pi / 2, math.pi / 2, math.pi / 2),
    "X/2": (math.pi / 2, math.pi / 4, math.pi),
    "Y/2": (math.pi / 2, math.pi / 4, 3 * math.pi / 2),
    "-X/2": (math.pi / 2, math.pi / 4, 0.0),
    "-Y/2": (math.pi / 2, math.pi / 4, math.pi / 2),
}

# rotation angle and axis phase for the dynamical counterparts
DYNAMICAL_ANGLES: dict[str, tuple[float, float]] = {
    "X": (math.pi, 0.0),
    "Y": (math.pi, math.pi / 2),
    "X/2": (math.pi / 2, 0.0),
    "Y/2": (math.pi / 2, math.pi / 2),
    "-X/2": (-math.pi / 2, 0.0),
    "-Y/2": (-math.pi / 2, math.pi / 2),
}

NAMED_GATES = ("I", "X", "Y", "X/2", "Y/2", "-X/2", "-Y/2", "H", "T")


def named_gate(name: str, kind: str = "geometric", config: str = "A",
               total_width_ns: float = 80.0, dt: float = 0.05, drag_coef: float = 1.0,
               anharm_mhz: float = -190.0, channel: str = "xy_b") -> PulseSchedule:
    """Schedule for a named gate in either construction.

    H is Y/2 followed by X; T is X followed by a pi rotation about the
    equatorial axis at pi/8. Dynamical pulses reuse the geometric peak Rabi
    rate, so their widths scale with area: width = total_width * area / 2pi.
    """
    kw = dict(total_width_ns=total_width_ns, dt=dt, drag_coef=drag_coef,
              anharm_mhz=anharm_mhz, channel=channel)

    def one(gate: str) -> PulseSchedule:
        if gate == "I":
            return idle_schedule(total_width_ns, dt, channel)
        if kind == "geometric":
            th, ga, ph = GEOMETRIC_ANGLES[gate]
            return geometric_single_qubit(GateSpec(th, ga, ph, config=config), **kw)
        angle, axis = DYNAMICAL_ANGLES[gate]
        width = total_width_ns * abs(angle) / (2.0 * math.pi)
        return dynamical_single_qubit(angle, axis, width, dt=dt, drag_coef=drag_coef,
                                      anharm_mhz=anharm_mhz, channel=channel)

    if name in GEOMETRIC_ANGLES or name == "I":
        return one(name)
    if name == "H":
        return concat_schedules(one("Y/2"), one("X"))
    if name == "T":
        if kind == "geometric":
            tail = geometric_single_qubit(
                GateSpec(math.pi / 2, math.pi / 2, math.pi / 8, config=config), **kw)
        else:
            tail = dynamical_single_qubit(math.pi, math.pi / 8,
                                          total_width_ns / 2.0, dt=dt, drag_coef=drag_coef,
                                          anharm_mhz=anharm_mhz, channel=channel)
        return concat_schedules(one("X"), tail)
    raise ValueError(f"unknown gate {name!r}")


def named_target(name: str) -> np.ndarray:
    """Ideal 2x2 unitary of a named gate (global phase unspecified)."""
    if name == "I":
        return SI.copy()
    if name in GEOMETRIC_ANGLES:
        th, ga, ph = GEOMETRIC_ANGLES[name]
        return target_unitary(GateSpec(th, ga, ph))
    if name == "H":
        return named_target("X") @ named_target("Y/2")
    if name == "T":
        th, ga, ph = math.pi / 2, math.pi / 2, math.pi / 8
        return target_unitary(GateSpec(th, ga, ph)) @ named_target("X")
    raise ValueError(f"unknown gate {name!r}")


def bessel_j1(x: float) -> float:
    """First-kind Bessel J1 by its power series; ample accuracy for |x| < 10."""
    half = 0.5 * x
    term = half
    total = term
    for k in range(1, 60):
        term *= -(half * half) / (k * (k + 1))
        total += term
        if abs(term) < 1e-16 * max(1.0, abs(total)):
            break
    return total


def effective_coupling(g_ab_mhz: float, mod: ModulationParams,
                       enhanced: bool = False) -> tuple[float, float]:
    """Sideband coupling 2 g J1(amp/freq) and its phase -Phi + pi/2.

    enhanced=True multiplies by sqrt(2) for the bosonic matrix element of the
    second-excited-state sideband; the plain value is the bare two-level form.
    The calibration scan treats the coupling as a measured quantity either way.
    """
    z = mod.amp_mhz / mod.freq_mhz
    g = 2.0 * g_ab_mhz * bessel_j1(z)
    if enhanced:
        g *= math.sqrt(2.0)
    return g, -mod.phase + math.pi / 2


def parametric_cz_schedule(mod: ModulationParams, g_eff_mhz: float, delta_phi: float,
                           edge_ns: float = 8.0, dt: float = 0.05,
                           trim_ns: float = 0.0) -> PulseSchedule:
    """Two modulation bursts in series on the z_a channel.

    Each burst is a square envelope with sine-squared edges whose flat-top
    length makes the population of the second-excited sideband complete one
    half rotation at g_eff (edge contribution corrected through the Bessel
    scaling of the instantaneous coupling). The second burst's modulation
    phase is offset by delta_phi; the carrier runs on global schedule time so
    the bursts stay phase coherent. trim_ns is an additive fine adjustment of
    the flat-top found by calibration.
    """
    if g_eff_mhz <= 0:
        raise ValueError("effective coupling must be positive")
    z = mod.amp_mhz / mod.freq_mhz
    om = MHZ_TO_RAD_NS * g_eff_mhz
    n_edge = int(round(edge_ns / dt))
    t_edge = (np.arange(n_edge) + 0.5) * dt
    u_edge = np.sin(0.5 * math.pi * t_edge / edge_ns) ** 2
    j1_z = bessel_j1(z)
    edge_area = float(np.sum(om * np.array([bessel_j1(z * u) for u in u_edge]) / j1_z)) * dt
    flat = (math.pi - 2.0 * edge_area) / om + trim_ns
    if flat <= 0:
        raise ValueError("edges longer than the required rotation; shorten edge_ns")
    n_flat = int(round(flat / dt))
    n_burst = n_edge + n_flat + n_edge
    env = np.ones(n_burst)
    env[:n_edge] = u_edge
    env[n_burst - n_edge:] = u_edge[::-1]

    segs = []
    for k, phase_k in enumerate((mod.phase, mod.phase + delta_phi)):
        t_global = (np.arange(n_burst) + 0.5) * dt + k * n_burst * dt
        wave = mod.amp_mhz * env * np.sin(MHZ_TO_RAD_NS * mod.freq_mhz * t_global + phase_k)
        e = Envelope(dt, wave)
        segs.append(PulseSegment(e, phase_k, 0.0, None, e.integral_rad()))
    return PulseSchedule({"z_a": tuple(segs)}, dt)


def cz_target_unitary(gamma: float) -> np.ndarray:
    """Controlled-phase target diag(1, 1, 1, e^{i gamma})."""
    return np.diag([1.0, 1.0, 1.0, np.exp(1j * gamma)]).astype(complex)


def scale_amplitudes(sched: PulseSchedule, factor: float) -> PulseSchedule:
    """All xy drive amplitudes (I and Q) scaled by the given factor."""
    chans: dict[str, tuple[PulseSegment, ...]] = {}
    for name, segs in sched.channels.items():
        if name in Z_CHANNELS:
            chans[name] = segs
            continue
        out = []
        for s in segs:
            env = Envelope(s.envelope.dt, factor * s.envelope.samples)
            quad = (Envelope(s.quadrature.dt, factor * s.quadrature.samples)
                    if s.quadrature is not None else None)
            out.append(PulseSegment(env, s.phase, s.drag_coefficient, quad, factor * s.area))
        chans[name] = tuple(out)
    return PulseSchedule(chans, sched.dt, sched.detuning_mhz)


def with_detuning(sched: PulseSchedule, detuning_mhz: float) -> PulseSchedule:
    return replace(sched, detuning_mhz=detuning_mhz)


def export_schedule(sched: PulseSchedule, path: str, target: np.ndarray | None = None) -> None:
    """Plain-text schedule export: header, optional target, per-segment samples."""
    lines = ["# geogate schedule v1",
             f"dt {sched.dt:.12g}",
             f"duration {sched.total_duration:.12g}",
             f"detuning_mhz {sched.detuning_mhz:.12g}"]
    if target is not None:
        flat = np.asarray(target, dtype=complex).ravel()
        lines.append("target " + " ".join(f"{v.real:.12g} {v.imag:.12g}" for v in flat))
    for name in sorted(sched.channels):
        segs = sched.channels[name]
        lines.append(f"channel {name} {len(segs)}")
        for s in segs:
            lines.append(f"segment phase {s.phase:.12g} drag {s.drag_coefficient:.12g} "
                         f"area {s.area:.12g} samples {len(s.envelope.samples)}")
            q = s.quadrature.samples if s.quadrature is not None else np.zeros(len(s.envelope.samples))
            for i, qv in zip(s.envelope.samples, q):
                lines.append(f"{i:.12g} {qv:.12g}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def load_schedule(path: str) -> tuple[PulseSchedule, np.ndarray | None]:
    """Inverse of export_schedule."""
    with open(path) as f:
        lines = [ln.rstrip("\n") for ln in f if ln.strip() and not ln.startswith("#")]
    pos = 0

    def take(prefix: str) -> str:
        nonlocal pos
        if not lines[pos].startswith(prefix + " "):
            raise ValueError(f"malformed schedule file at line: {lines[pos]!r}")
        val = lines[pos][len(prefix) + 1:]
        pos += 1
        return val

    dt = float(take("dt"))
    take("duration")
    detuning = float(take("detuning_mhz"))
    target = None
    if pos < len(lines) and lines[pos].startswith("target "):
        vals = [float(x) for x in take("target").split()]
        n = int(round(math.sqrt(len(vals) // 2)))
        target = (np.array(vals[0::2]) + 1j * np.array(vals[1::2])).reshape(n, n)
    chans: dict[str, tuple[PulseSegment, ...]] = {}
    while pos < len(lines):
        name, n_segs = take("channel").split()
        segs = []
        for _ in range(int(n_segs)):
            meta = take("segment").split()
            phase, drag, area, n = float(meta[1]), float(meta[3]), float(meta[5]), int(meta[7])
            block = lines[pos:pos + n]
            pos += n
            iv = np.array([float(x.split()[0]) for x in block])
            qv = np.array([float(x.split()[1]) for x in block])
            env = Envelope(dt, iv)
            quad = Envelope(dt, qv) if np.any(qv != 0) else None
            segs.append(PulseSegment(env, phase, drag, quad, area))
        chans[name] = tuple(segs)
    return PulseSchedule(chans, dt, detuning), target
