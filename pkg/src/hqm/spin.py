"""Spin-1/2 in a uniform field along x3: operators, closed-form states, moments and RK4.

Spin operators are realized with the imaginary unit moved to the right:

    S1 = (hbar/2) sigma_1,   S2 = (hbar/2) (J2 | eta),   S3 = (hbar/2) sigma_3,

where J2 = [[0, -1], [1, 0]] is real, so ``sigma_2 = (J2 | i)`` on complex
spinors. With this realization the algebra [S_a, S_b] = hbar eps_abc (S_c | eta)
holds for every imaginary unit eta, and the moments of both closed-form
states come out as stated in the module-level functions below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResolutionError
from .quat import ImaginaryUnit, UNIT_I, as_right_matrix4, cj_to_quat, qmul
from .rhilbert import J2, SIGMA1, SIGMA3, BarredOp, QMatrix, QSpinor, expectation


@dataclass(frozen=True)
class LarmorConfig:
    gamma: float = 1.0
    B0: float = 1.0
    hbar: float = 1.0

    @property
    def E(self) -> float:
        return self.hbar * self.gamma * self.B0 / 2

    @property
    def omega(self) -> float:
        return -self.gamma * self.B0


@dataclass(frozen=True)
class Case1State:
    theta: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class Case2State:
    alpha: float
    beta: float

    @property
    def eta(self) -> ImaginaryUnit:
        """e^{i(alpha - beta)} j."""
        return ImaginaryUnit.jphase(self.alpha - self.beta)


def spin_operators(eta: ImaginaryUnit = UNIT_I, hbar: float = 1.0) -> tuple[BarredOp, BarredOp, BarredOp]:
    half = hbar / 2
    return (BarredOp(SIGMA1 * half), BarredOp(J2 * half, eta), BarredOp(SIGMA3 * half))


def hamiltonian(cfg: LarmorConfig) -> QMatrix:
    """-E sigma_3 with E = hbar gamma B0 / 2."""
    return SIGMA3 * (-cfg.E)


def psi_case1(state: Case1State, cfg: LarmorConfig, t: float) -> QSpinor:
    return QSpinor.from_array(psi_case1_array(state, cfg, t))


def psi_case1_array(state: Case1State, cfg: LarmorConfig, t) -> np.ndarray:
    """Vectorized over ``t``; returns shape ``t.shape + (2, 4)``."""
    t = np.asarray(t, dtype=float)
    ph = np.exp(1j * cfg.E * t / cfg.hbar)
    c, s = math.cos(state.theta), math.sin(state.theta)
    up = cj_to_quat(c * math.cos(state.alpha / 2) * ph, s * math.cos(state.beta / 2) * np.conj(ph))
    down = cj_to_quat(c * math.sin(state.alpha / 2) * np.conj(ph), s * math.sin(state.beta / 2) * ph)
    return np.stack([up, down], axis=-2)


def expectations_case1(state: Case1State, cfg: LarmorConfig, t) -> tuple[float, float, float]:
    c2, s2 = math.cos(state.theta) ** 2, math.sin(state.theta) ** 2
    half = cfg.hbar / 2
    transverse = half * (c2 * math.sin(state.alpha) + s2 * math.sin(state.beta))
    wt = cfg.omega * np.asarray(t, dtype=float)
    longitudinal = half * (c2 * math.cos(state.alpha) + s2 * math.cos(state.beta))
    return transverse * np.cos(wt), transverse * np.sin(wt), longitudinal + 0.0 * wt


def mean_vector_sq_case1(state: Case1State, hbar: float = 1.0) -> float:
    """Closed-form sum of squared first moments for case 1 (time independent)."""
    c2, s2 = math.cos(state.theta) ** 2, math.sin(state.theta) ** 2
    return hbar**2 / 4 * (c2 * c2 + s2 * s2 + 2 * s2 * c2 * math.cos(state.alpha - state.beta))


def sigma_s(state: Case1State, hbar: float = 1.0) -> float:
    return hbar / 2 * abs(math.sin(2 * state.theta) * math.sin((state.alpha - state.beta) / 2))


def psi_case2(state: Case2State, cfg: LarmorConfig, t: float) -> QSpinor:
    return QSpinor.from_array(psi_case2_array(state, cfg, t))


def psi_case2_array(state: Case2State, cfg: LarmorConfig, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    c, s = np.cos(cfg.omega * t / 2), np.sin(cfg.omega * t / 2)
    ea = np.exp(1j * state.alpha) / math.sqrt(2)
    eb = np.exp(1j * state.beta) / math.sqrt(2)
    up = cj_to_quat(ea * c, -eb * s)
    down = cj_to_quat(ea * s, eb * c)
    return np.stack([up, down], axis=-2)


def expectations_case2(state: Case2State, cfg: LarmorConfig, t) -> tuple[float, float, float, float]:
    """All first moments vanish and the second-moment sum is 3 hbar^2 / 4."""
    return 0.0, 0.0, 0.0, 0.75 * cfg.hbar**2


def numeric_moments(psi, hbar: float = 1.0, eta: ImaginaryUnit = UNIT_I) -> tuple[np.ndarray, np.ndarray]:
    """First and second moments Re[psi^dagger S_a psi], Re[psi^dagger S_a S_a psi] for a = 1, 2, 3."""
    ops = spin_operators(eta, hbar)
    arr = psi.as_array() if isinstance(psi, QSpinor) else np.asarray(psi, dtype=float)
    first = np.array([expectation(op, arr) for op in ops])
    second = np.array([float(np.sum(op.apply_array(arr) * op.apply_array(arr))) for op in ops])
    # Re[psi^dagger S S psi] = |S psi|^2 because each S_a is symmetric for the real inner product
    return first, second


def spin_spread(psi, hbar: float = 1.0, eta: ImaginaryUnit = UNIT_I) -> float:
    """sqrt(hbar^2/4 - |<S>|^2): how far the mean spin vector falls short of length hbar/2."""
    first, _ = numeric_moments(psi, hbar, eta)
    return math.sqrt(max(hbar**2 / 4 - float(first @ first), 0.0))


# -- time evolution ------------------------------------------------------------


def generator_matrix(H: QMatrix | BarredOp, eta: ImaginaryUnit, hbar: float) -> np.ndarray:
    """8x8 real matrix of psi -> -(1/hbar) (H psi) eta."""
    h_real = H.real_matrix()
    right = np.kron(np.eye(2), as_right_matrix4(eta.as_array()))
    return -(right @ h_real) / hbar


def _rk4_steps(gen: np.ndarray, v: np.ndarray, dt: float, steps: int, record_every: int = 0) -> tuple[np.ndarray, list]:
    path = []
    for n in range(steps):
        k1 = gen @ v
        k2 = gen @ (v + 0.5 * dt * k1)
        k3 = gen @ (v + 0.5 * dt * k2)
        k4 = gen @ (v + dt * k3)
        v = v + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if record_every and (n + 1) % record_every == 0:
            path.append(v)
    return v, path


def evolve_rk4(
    psi0: QSpinor,
    H: QMatrix | BarredOp,
    eta: ImaginaryUnit,
    cfg: LarmorConfig,
    t_final: float,
    steps: int,
) -> QSpinor:
    """Integrate hbar dpsi/dt eta = H psi, i.e. dpsi/dt = -(1/hbar)(H psi) eta, with classical RK4."""
    if steps < 16:
        raise ResolutionError(f"need at least 16 steps, got {steps}")
    if cfg.hbar <= 0:
        raise ValueError("hbar must be positive")
    gen = generator_matrix(H, eta, cfg.hbar)
    v, _ = _rk4_steps(gen, psi0.as_real_vector(), t_final / steps, steps)
    return QSpinor.from_array(v)


def evolve_rk4_path(
    psi0: QSpinor,
    H: QMatrix | BarredOp,
    eta: ImaginaryUnit,
    cfg: LarmorConfig,
    t_final: float,
    samples: int,
    substeps: int,
) -> np.ndarray:
    """States at t_k = k t_final / samples for k = 0..samples, shape (samples + 1, 2, 4)."""
    if samples * substeps < 16:
        raise ResolutionError("need at least 16 steps in total")
    gen = generator_matrix(H, eta, cfg.hbar)
    v0 = psi0.as_real_vector()
    _, path = _rk4_steps(gen, v0, t_final / (samples * substeps), samples * substeps, substeps)
    return np.stack([v0] + path).reshape(-1, 2, 4)


def schrodinger_residual(psi_of_t, H: QMatrix | BarredOp, eta: ImaginaryUnit, cfg: LarmorConfig, t: float, h_t: float) -> float:
    """|hbar (psi(t+h) - psi(t-h))/(2h) eta - H psi(t)| for a spinor-array valued ``psi_of_t``."""
    dpsi = (np.asarray(psi_of_t(t + h_t)) - np.asarray(psi_of_t(t - h_t))) / (2 * h_t)
    lhs = cfg.hbar * qmul(dpsi, eta.as_array())
    rhs = H.apply_array(np.asarray(psi_of_t(t)))
    return float(np.sqrt(np.sum((lhs - rhs) ** 2)))


def transverse_hamiltonian(cfg: LarmorConfig, eta: ImaginaryUnit) -> BarredOp:
    """-E (J2 | eta): a field of the same strength along x2 in the eta realization."""
    return BarredOp(J2 * (-cfg.E), eta)
