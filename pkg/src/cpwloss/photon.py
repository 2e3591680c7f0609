"""Drive-power budget and average intra-resonator photon number.

Magnitude scattering coefficients at resonance follow from the loaded and
coupling quality factors, the dissipated power from energy conservation
P_loss = P_in (1 - |S21|^2 - |S11|^2), and the average photon number from
<n> = Qi * P_loss / (hbar * omega^2). Power is carried in watts internally;
dBm appears only at the API boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import HBAR_JS


def dbm_to_watt(p_dbm: float) -> float:
    """P[W] = 10^((dBm - 30)/10)."""
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watt_to_dbm(p_w: float) -> float:
    """Inverse of :func:`dbm_to_watt`; requires positive power."""
    if p_w <= 0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(p_w) + 30.0


def scattering_mags(ql: float, qc_mag: float) -> tuple[float, float]:
    """On-resonance magnitudes (|S21|, |S11|) from Ql and |Qc|.

    |S21| = (|Qc| - Ql)^2 / |Qc|^2 and |S11| = Ql^2 / |Qc|^2. For Ql close
    to |Qc| these approximations can violate |S21|^2 + |S11|^2 <= 1; that is
    flagged downstream by :func:`power_loss`.
    """
    if ql <= 0 or qc_mag <= 0:
        raise ValueError("ql and qc_mag must be positive")
    s21 = (qc_mag - ql) ** 2 / qc_mag**2
    s11 = ql**2 / qc_mag**2
    return s21, s11


def power_loss(p_in_w: float, s21_mag: float, s11_mag: float) -> float:
    """Dissipated power P_in * (1 - |S21|^2 - |S11|^2), in W.

    Raises when the scattering magnitudes violate energy conservation
    (|S21|^2 + |S11|^2 > 1) instead of clamping, so the validity envelope of
    the on-resonance approximations is surfaced rather than hidden.
    """
    if p_in_w < 0:
        raise ValueError("input power must be >= 0")
    if s21_mag < 0 or s11_mag < 0:
        raise ValueError("scattering magnitudes must be >= 0")
    frac = 1.0 - s21_mag**2 - s11_mag**2
    if frac < 0:
        raise ValueError(
            f"|S21|^2 + |S11|^2 = {s21_mag**2 + s11_mag**2:.6f} > 1: "
            "scattering inputs outside the validity range"
        )
    return p_in_w * frac


def photon_number(qi: float, p_loss_w: float, f_hz: float) -> float:
    """Average photon number <n> = Qi * P_loss / (hbar * omega^2)."""
    if qi <= 0 or f_hz <= 0:
        raise ValueError("qi and f_hz must be positive")
    if p_loss_w < 0:
        raise ValueError("dissipated power must be >= 0")
    omega = 2.0 * math.pi * f_hz
    return qi * p_loss_w / (HBAR_JS * omega**2)


def power_for_photons(
    n_target: float, qi: float, ql: float, qc_mag: float, f_hz: float
) -> float:
    """Feedline power (dBm) that puts ``n_target`` photons in the resonator.

    Exact algebraic inversion of the scattering/loss/photon chain.
    """
    if n_target <= 0:
        raise ValueError("photon target must be positive")
    s21, s11 = scattering_mags(ql, qc_mag)
    frac = 1.0 - s21**2 - s11**2
    if frac <= 0:
        raise ValueError("zero or negative loss fraction: power is undefined")
    omega = 2.0 * math.pi * f_hz
    p_in_w = n_target * HBAR_JS * omega**2 / (qi * frac)
    return watt_to_dbm(p_in_w)


@dataclass(frozen=True)
class PowerBudget:
    """Complete drive-power accounting for one operating point."""

    p_vna_dbm: float
    p_att_db: float
    p_in_dbm: float
    p_loss_w: float
    s21_mag: float
    s11_mag: float
    n_ph: float

    def __post_init__(self) -> None:
        if abs(self.p_in_dbm - (self.p_vna_dbm + self.p_att_db)) > 1e-9:
            raise ValueError("p_in_dbm must equal p_vna_dbm + p_att_db")
        if self.s21_mag < 0 or self.s11_mag < 0:
            raise ValueError("scattering magnitudes must be >= 0")
        if self.s21_mag**2 + self.s11_mag**2 > 1.0:
            raise ValueError("|S21|^2 + |S11|^2 > 1 violates energy conservation")
        if self.n_ph < 0:
            raise ValueError("photon number must be >= 0")


def build_power_budget(
    p_vna_dbm: float,
    p_att_db: float,
    ql: float,
    qc_mag: float,
    qi: float,
    f_hz: float,
) -> PowerBudget:
    """Forward chain: source power and attenuation to photon number."""
    p_in_dbm = p_vna_dbm + p_att_db
    s21, s11 = scattering_mags(ql, qc_mag)
    p_loss = power_loss(dbm_to_watt(p_in_dbm), s21, s11)
    n_ph = photon_number(qi, p_loss, f_hz)
    return PowerBudget(
        p_vna_dbm=p_vna_dbm,
        p_att_db=p_att_db,
        p_in_dbm=p_in_dbm,
        p_loss_w=p_loss,
        s21_mag=s21,
        s11_mag=s11,
        n_ph=n_ph,
    )
