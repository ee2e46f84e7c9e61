"""Flux-noise bath: spectral density seen by the qubits.

The flux power spectrum is a sum of a low-frequency 1/f-like part and an
ohmic high-frequency part,

    S_LF(w) = (A^2 / k_B T) * hbar*w * |w|^(-alpha) / (1 - exp(-hbar w / k_B T))
    S_HF(w) = (hbar^2 / (4 I_p0^2)) * eta * w * exp(-|w|/w_c)
                                        / (1 - exp(-hbar w / k_B T))

and the energy-coupled density is S(w) = 4 I_p^2 (S_LF + S_HF), in J^2*s.
Both parts satisfy S(w)/S(-w) = exp(hbar w / k_B T), so transition rates
built from S obey detailed balance at temperature T.

Unit conventions in BathParams: a_1f in units of the flux quantum
(so 3 nPhi0 is 3e-9), omega_c in rad/s, temperature in mK, currents in uA.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .units import HBAR, K_BOLTZMANN, PHI0

# Below this |omega| the 1/f part is evaluated at the clamp value instead;
# it diverges as 1/|w| and transitions between exactly degenerate levels
# would otherwise get an infinite rate.
OMEGA_IR_CLAMP = 2.0 * math.pi * 1e6   # rad/s


@dataclass(frozen=True)
class BathParams:
    eta: float = 0.4
    a_1f: float = 3e-9            # flux-noise amplitude, Phi0 units
    alpha: float = 1.0
    omega_c: float = 2.0 * math.pi * 1e12   # rad/s
    t_mk: float = 20.0
    ip0_ua: float = 1.0
    # persistent current vs anneal fraction: ((tau, I in uA), ...) breakpoints,
    # linearly interpolated; empty means constant ip0_ua
    ip_of_tau: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.eta < 0:
            raise ValidationError("eta must be >= 0")
        if self.t_mk <= 0:
            raise ValidationError("temperature must be positive")
        if self.omega_c <= 0:
            raise ValidationError("omega_c must be positive")
        if self.ip0_ua <= 0:
            raise ValidationError("reference persistent current must be positive")

    def ip_amps(self, tau: float = 1.0) -> float:
        """Persistent current at anneal fraction tau, in amperes."""
        if not self.ip_of_tau:
            return self.ip0_ua * 1e-6
        pts = sorted(self.ip_of_tau)
        if tau <= pts[0][0]:
            return pts[0][1] * 1e-6
        if tau >= pts[-1][0]:
            return pts[-1][1] * 1e-6
        for (t0, i0), (t1, i1) in zip(pts, pts[1:]):
            if t0 <= tau <= t1:
                w = 0.0 if t1 == t0 else (tau - t0) / (t1 - t0)
                return (i0 + w * (i1 - i0)) * 1e-6
        return pts[-1][1] * 1e-6

    def to_dict(self):
        data = {"eta": self.eta, "A_1f": self.a_1f, "alpha": self.alpha,
                "omega_c": self.omega_c, "T_mK": self.t_mk,
                "Ip0_uA": self.ip0_ua}
        if self.ip_of_tau:
            data["Ip_of_tau"] = [[t, i] for t, i in self.ip_of_tau]
        return data

    @classmethod
    def from_dict(cls, data) -> "BathParams":
        return cls(
            eta=float(data.get("eta", 0.4)),
            a_1f=float(data.get("A_1f", 3e-9)),
            alpha=float(data.get("alpha", 1.0)),
            omega_c=float(data.get("omega_c", 2.0 * math.pi * 1e12)),
            t_mk=float(data.get("T_mK", 20.0)),
            ip0_ua=float(data.get("Ip0_uA", 1.0)),
            ip_of_tau=tuple((float(t), float(i))
                            for t, i in data.get("Ip_of_tau", ())),
        )

    @classmethod
    def load(cls, path) -> "BathParams":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def _bose_factor(omega, kt):
    """1 / (1 - exp(-hbar w / k_B T)), stable for large |x|."""
    x = np.clip(HBAR * np.asarray(omega, dtype=float) / kt, -700.0, 700.0)
    with np.errstate(divide="ignore"):
        return np.where(x > 0,
                        1.0 / (1.0 - np.exp(-np.abs(x))),
                        -np.exp(x) / (1.0 - np.exp(-np.abs(x))))


def flux_spectral_density(omega, bath: BathParams):
    """S_Phi(omega) in Wb^2 * s; omega in rad/s (clamped near zero).

    Accepts scalars or arrays; the +/- sides differ by the detailed-balance
    factor exp(hbar w / kT).
    """
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.where(np.abs(w) < OMEGA_IR_CLAMP,
                 np.where(w < 0, -OMEGA_IR_CLAMP, OMEGA_IR_CLAMP), w)
    kt = K_BOLTZMANN * bath.t_mk * 1e-3
    occupancy = _bose_factor(w, kt)
    amp = bath.a_1f * PHI0
    s_lf = (amp * amp / kt) * HBAR * w * np.abs(w) ** (-bath.alpha) \
        * occupancy
    ip0 = bath.ip0_ua * 1e-6
    s_hf = (HBAR * HBAR / (4.0 * ip0 * ip0)) * bath.eta * w \
        * np.exp(-np.abs(w) / bath.omega_c) * occupancy
    total = s_lf + s_hf
    return float(total) if scalar else total


def spectral_density(omega, bath: BathParams, tau: float = 1.0):
    """Energy-coupled bath density S(omega) = 4 I_p(tau)^2 S_Phi, in J^2*s."""
    ip = bath.ip_amps(tau)
    return 4.0 * ip * ip * flux_spectral_density(omega, bath)


def transition_rate(omega, bath: BathParams, tau: float = 1.0):
    """Golden-rule rate factor S(omega)/hbar^2, in 1/s."""
    return spectral_density(omega, bath, tau) / (HBAR * HBAR)
