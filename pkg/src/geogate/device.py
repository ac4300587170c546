"""Two-transmon device model: parameters, Hamiltonian builders, decoherence.

Units convention, fixed package-wide: user-facing frequencies are linear
(divided by 2 pi) in MHz, qubit frequencies in GHz in the config file, times
in ns. The conversion to angular rad/ns happens inside the Hamiltonian
builders and nowhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # py3.10
    import tomli as tomllib

from .hilbert import lowering, number, tensor

MHZ_TO_RAD_NS = 2e-3 * math.pi  # linear MHz -> angular rad/ns


@dataclass(frozen=True)
class TransmonParams:
    """Single transmon: frequency (GHz), anharmonicity (MHz), coherence (us)."""

    freq_ghz: float
    anharmonicity_mhz: float
    t1_us: float
    t2_star_us: float
    levels: int = 3

    def __post_init__(self) -> None:
        if self.anharmonicity_mhz >= 0:
            raise ValueError("anharmonicity must be negative")
        if self.t1_us <= 0:
            raise ValueError("t1 must be positive")
        if self.t2_star_us > 2 * self.t1_us:
            raise ValueError("t2* exceeds 2*t1 (unphysical)")
        if self.levels not in (2, 3):
            raise ValueError("levels must be 2 or 3")

    @property
    def freq_mhz(self) -> float:
        return self.freq_ghz * 1e3

    @property
    def pure_dephasing_rate_per_us(self) -> float:
        """1/Tphi = 1/T2* - 1/(2 T1)."""
        return 1.0 / self.t2_star_us - 0.5 / self.t1_us


@dataclass(frozen=True)
class ModulationParams:
    """Sinusoidal frequency modulation: amp * sin(2 pi freq t + phase)."""

    amp_mhz: float
    freq_mhz: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.amp_mhz < 0:
            raise ValueError("modulation amplitude must be >= 0")
        if self.freq_mhz <= 0:
            raise ValueError("modulation frequency must be > 0")


@dataclass(frozen=True)
class DeviceModel:
    qubit_a: TransmonParams
    qubit_b: TransmonParams
    g_ab_mhz: float
    flux_crosstalk: np.ndarray = field(repr=False)
    readout_matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        m = np.asarray(self.flux_crosstalk, dtype=float)
        r = np.asarray(self.readout_matrix, dtype=float)
        object.__setattr__(self, "flux_crosstalk", m)
        object.__setattr__(self, "readout_matrix", r)
        if m.shape != (2, 2):
            raise ValueError("flux crosstalk matrix must be 2x2")
        if np.max(np.abs(np.diag(m) - 1.0)) > 1e-12:
            raise ValueError("flux crosstalk matrix must have unit diagonal")
        if r.shape != (4, 4):
            raise ValueError("readout assignment matrix must be 4x4")
        if np.any(r < 0) or np.any(r > 1):
            raise ValueError("readout matrix entries must lie in [0, 1]")
        if np.max(np.abs(r.sum(axis=0) - 1.0)) > 1e-3:
            raise ValueError("readout matrix columns must each sum to 1")

    @property
    def detuning_ab_mhz(self) -> float:
        """Static qubit-qubit detuning (freq_a - freq_b) in MHz."""
        return self.qubit_a.freq_mhz - self.qubit_b.freq_mhz

    def qubit(self, which: str) -> TransmonParams:
        if which == "a":
            return self.qubit_a
        if which == "b":
            return self.qubit_b
        raise ValueError(f"unknown qubit {which!r}")


def load_device(path: str | None = None) -> DeviceModel:
    """Load a device model from a TOML config; None loads the packaged default."""
    if path is None:
        text = resources.files("geogate.data").joinpath("default_device.toml").read_text()
        cfg = tomllib.loads(text)
    else:
        with open(path, "rb") as f:
            cfg = tomllib.load(f)
    try:
        qa = cfg["qubit_a"]
        qb = cfg["qubit_b"]
        return DeviceModel(
            qubit_a=TransmonParams(qa["freq_ghz"], qa["anharmonicity_mhz"],
                                   qa["t1_us"], qa["t2_star_us"]),
            qubit_b=TransmonParams(qb["freq_ghz"], qb["anharmonicity_mhz"],
                                   qb["t1_us"], qb["t2_star_us"]),
            g_ab_mhz=cfg["coupling"]["g_ab_mhz"],
            flux_crosstalk=cfg["crosstalk"]["flux_matrix"],
            readout_matrix=cfg["readout"]["assignment_matrix"],
        )
    except KeyError as exc:
        raise ValueError(f"device config missing key: {exc}") from exc


@lru_cache(maxsize=1)
def default_device() -> DeviceModel:
    return load_device(None)


def drive_hamiltonian(q: TransmonParams, omega_mhz: float, phi: float,
                      detuning_mhz: float = 0.0) -> np.ndarray:
    """Resonant-frame drive Hamiltonian in rad/ns.

    The drive with Rabi rate Omega and phase phi enters as
    <1|H|0> = (Omega/2) e^{i phi}; the rotation axis azimuth equals +phi.
    For a 3-level transmon the 1-2 transition element carries the bosonic
    sqrt(2) and the second level sits at 2*detuning + anharmonicity.
    """
    d = q.levels
    raise_op = lowering(d).conj().T
    b = omega_mhz * np.exp(1j * phi)
    h = 0.5 * (b * raise_op + np.conj(b) * raise_op.conj().T)
    h[1, 1] += detuning_mhz
    if d == 3:
        h[2, 2] += 2.0 * detuning_mhz + q.anharmonicity_mhz
    return MHZ_TO_RAD_NS * h


@lru_cache(maxsize=4)
def pair_operators(da: int = 3, db: int = 3) -> dict:
    """Operator set for the coupled pair, qubit A as the leading tensor factor."""
    ia, ib = np.eye(da, dtype=complex), np.eye(db, dtype=complex)
    la, lb = lowering(da), lowering(db)
    n_a = tensor(number(da), ib)
    n_b = tensor(ia, number(db))
    # anharmonicity projectors alpha/2 * n(n-1) -> |2><2| for 3 levels
    def anh(d):
        return np.diag([0.5 * n * (n - 1) for n in range(d)]).astype(complex)
    adag_b = tensor(la.conj().T, lb)  # a^dag b
    return {
        "n_a": n_a,
        "n_b": n_b,
        "anh_a": tensor(anh(da), ib),
        "anh_b": tensor(ia, anh(db)),
        "ex_x": adag_b + adag_b.conj().T,
        "ex_y": 1j * (adag_b - adag_b.conj().T),
    }


def coupled_hamiltonian(dev: DeviceModel, mod: ModulationParams, t: float) -> np.ndarray:
    """9x9 pair Hamiltonian at time t (ns), doubly rotating frame at the
    static qubit frequencies, in rad/ns.

    Qubit A's frequency is modulated: the instantaneous detuning
    amp*sin(2 pi freq t + phase) multiplies A's number operator. The exchange
    coupling rotates at the static qubit-qubit detuning.
    """
    if dev.qubit_a.levels != 3 or dev.qubit_b.levels != 3:
        raise ValueError("coupled pair model requires 3-level transmons")
    ops = pair_operators()
    delta = mod.amp_mhz * math.sin(MHZ_TO_RAD_NS * mod.freq_mhz * t + mod.phase)
    ang = MHZ_TO_RAD_NS * dev.detuning_ab_mhz * t
    h = (dev.qubit_a.anharmonicity_mhz * ops["anh_a"]
         + dev.qubit_b.anharmonicity_mhz * ops["anh_b"]
         + delta * ops["n_a"]
         + dev.g_ab_mhz * (math.cos(ang) * ops["ex_x"] + math.sin(ang) * ops["ex_y"]))
    return MHZ_TO_RAD_NS * h


def collapse_operators(q: TransmonParams) -> list[np.ndarray]:
    """Lindblad operators in 1/sqrt(ns): amplitude damping and pure dephasing.

    Rates follow from T1 and T2*: 1/Tphi = 1/T2* - 1/(2 T1). The dephasing
    operator 2n with rate 1/(2 Tphi) makes the 0-1 coherence decay at 1/T2.
    """
    if q.t2_star_us > 2 * q.t1_us:
        raise ValueError("t2* exceeds 2*t1 (unphysical)")
    d = q.levels
    gamma1 = 1.0 / (q.t1_us * 1e3)
    gamma_phi = q.pure_dephasing_rate_per_us / 1e3
    ops = [math.sqrt(gamma1) * lowering(d)]
    if gamma_phi > 0:
        ops.append(math.sqrt(0.5 * gamma_phi) * 2.0 * number(d))
    return ops


def zz_rate(dev: DeviceModel) -> float:
    """Static conditional shift of |11> through |02>/|20| repulsion, in MHz."""
    delta = dev.detuning_ab_mhz
    aa = dev.qubit_a.anharmonicity_mhz
    ab = dev.qubit_b.anharmonicity_mhz
    den1 = delta - aa
    den2 = delta + ab
    if abs(den1) < 1e-6 or abs(den2) < 1e-6:
        raise ValueError("straddled resonance: qubit detuning degenerate with anharmonicity")
    return 2.0 * dev.g_ab_mhz**2 * (aa + ab) / (den1 * den2)


def flux_orthogonalize(dev: DeviceModel, intended: np.ndarray) -> np.ndarray:
    """Bias commands whose crosstalk-mixed effect equals the intended shifts."""
    intended = np.asarray(intended, dtype=float)
    if intended.shape != (2,):
        raise ValueError("intended frequency shifts must be a 2-vector")
    try:
        return np.linalg.solve(dev.flux_crosstalk, intended)
    except np.linalg.LinAlgError as exc:
        raise ValueError("flux crosstalk matrix is singular") from exc
