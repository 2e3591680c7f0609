"""Notch-type complex S21 model, environment calibration and resonance fitting.

The transmission of a resonator side-coupled to a feedline is modelled as

    S21(f) = a * exp(j phase0) * exp(-2j pi f tau)
             * [1 - (Ql/|Qc|) * exp(j phi) / (1 + 2j Ql (f/fr - 1))]

(diameter-corrected notch form). Fitting proceeds through the usual seeded
pipeline: cable-delay estimate from the off-resonant wings, algebraic
(Taubin) circle fit, arctangent phase-vs-frequency fit, environment
calibration from the off-resonant point, then a joint Levenberg-Marquardt
refinement of all seven parameters on the stacked real/imaginary residuals.
Qi follows from 1/Qi = 1/Ql - Re(exp(j phi))/|Qc|.

Fits on different traces are independent and safe to run in parallel; the
synthetic-trace generator is seeded per call and never shares RNG state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import FitError

PARAM_NAMES = ("fr_hz", "ql", "qc_mag", "phi_rad", "amp", "phase0_rad", "tau_s")


def _wrap_angle(a: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    w = math.remainder(a, 2.0 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class NotchParams:
    """Parameters of the notch model; angles in rad, tau in s."""

    fr_hz: float
    ql: float
    qc_mag: float
    phi_rad: float
    amp: float = 1.0
    phase0_rad: float = 0.0
    tau_s: float = 0.0

    def __post_init__(self) -> None:
        if self.fr_hz <= 0:
            raise ValueError("fr_hz must be positive")
        if self.ql <= 0 or self.qc_mag <= 0:
            raise ValueError("ql and qc_mag must be positive")
        if not abs(self.phi_rad) < math.pi / 2:
            raise ValueError("impedance-mismatch angle must satisfy |phi| < pi/2")
        if self.amp <= 0:
            raise ValueError("amp must be positive")

    @property
    def qi(self) -> float:
        """Internal quality factor; inf or negative marks an unphysical set."""
        inv = 1.0 / self.ql - math.cos(self.phi_rad) / self.qc_mag
        return math.inf if inv == 0.0 else 1.0 / inv

    @property
    def is_physical(self) -> bool:
        """True when the derived Qi is positive and finite."""
        return 1.0 / self.ql - math.cos(self.phi_rad) / self.qc_mag > 0.0


@dataclass
class S21Trace:
    """One complex transmission trace on a strictly ascending frequency grid."""

    freq_hz: np.ndarray
    s21: np.ndarray
    temperature_k: float | None = None
    power_dbm: float | None = None
    source: str | None = None

    def __post_init__(self) -> None:
        self.freq_hz = np.asarray(self.freq_hz, dtype=float)
        self.s21 = np.asarray(self.s21, dtype=complex)
        if self.freq_hz.ndim != 1 or self.freq_hz.size < 2:
            raise ValueError("need at least two frequency points")
        if self.s21.shape != self.freq_hz.shape:
            raise ValueError("freq_hz and s21 must have the same shape")
        if not np.all(np.diff(self.freq_hz) > 0):
            raise ValueError("frequencies must be strictly ascending")
        if not (np.all(np.isfinite(self.freq_hz)) and np.all(np.isfinite(self.s21))):
            raise ValueError("trace contains non-finite values")

    def __len__(self) -> int:
        return int(self.freq_hz.size)


@dataclass(frozen=True)
class NotchFitResult:
    """Fit output: best parameters, derived Qi, 1-sigma errors, residual."""

    params: NotchParams
    qi: float
    stderr: dict[str, float]
    rms_residual: float
    n_points: int
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class DelayEstimate:
    tau_s: float
    stderr_s: float
    n_points: int


@dataclass(frozen=True)
class CircleFit:
    center: complex
    radius: float
    rms_residual: float


@dataclass(frozen=True)
class PhaseFit:
    fr_hz: float
    ql: float
    theta0_rad: float
    rms_residual: float


def model_s21(p: NotchParams, freq_hz):
    """Evaluate the notch model at the given frequencies."""
    f = np.asarray(freq_hz, dtype=float)
    detune = 1.0 + 2j * p.ql * (f / p.fr_hz - 1.0)
    notch = 1.0 - (p.ql / p.qc_mag) * np.exp(1j * p.phi_rad) / detune
    env = p.amp * np.exp(1j * (p.phase0_rad - 2.0 * np.pi * f * p.tau_s))
    out = env * notch
    return complex(out) if np.ndim(freq_hz) == 0 else out


def synth_trace(
    p: NotchParams,
    freq_hz,
    noise_sigma: float = 0.0,
    seed: int = 0,
    temperature_k: float | None = None,
    power_dbm: float | None = None,
) -> S21Trace:
    """Model trace plus independent complex Gaussian noise (sigma per quadrature).

    Deterministic for a given seed.
    """
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    f = np.asarray(freq_hz, dtype=float)
    z = model_s21(p, f).astype(complex)
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        z = z + noise_sigma * (
            rng.standard_normal(f.size) + 1j * rng.standard_normal(f.size)
        )
    return S21Trace(f, z, temperature_k=temperature_k, power_dbm=power_dbm)


def _wing_slope(f: np.ndarray, z: np.ndarray) -> tuple[float, float]:
    """Least-squares slope of unwrapped phase vs frequency on one wing."""
    theta = np.unwrap(np.angle(z))
    fm = f - f.mean()
    sxx = float(np.dot(fm, fm))
    slope = float(np.dot(fm, theta - theta.mean())) / sxx
    resid = theta - theta.mean() - slope * fm
    dof = max(len(f) - 2, 1)
    var = float(np.dot(resid, resid)) / dof / sxx
    return slope, var


def estimate_delay(trace: S21Trace, wing_fraction: float = 0.2) -> DelayEstimate:
    """Cable delay from the phase slope of the off-resonant wings.

    Fits a line to the unwrapped phase on the outer ``wing_fraction`` of the
    points (half per side) and returns tau = -slope/(2 pi). The returned
    standard error is the weighted-fit error; on resonance-free or noisy
    data it can exceed the estimate itself, which callers should treat as
    "no usable delay information".
    """
    n = len(trace)
    if n < 16:
        raise FitError("delay estimation needs at least 16 points")
    k = max(3, int(round(0.5 * wing_fraction * n)))
    f, z = trace.freq_hz, trace.s21
    slopes, variances = [], []
    for sl in (slice(0, k), slice(n - k, n)):
        s, v = _wing_slope(f[sl], z[sl])
        slopes.append(s)
        variances.append(v)
    if all(v == 0.0 for v in variances):
        slope = float(np.mean(slopes))
        err = 0.0
    else:
        w = [1.0 / max(v, 1e-300) for v in variances]
        slope = (slopes[0] * w[0] + slopes[1] * w[1]) / (w[0] + w[1])
        err = math.sqrt(1.0 / (w[0] + w[1]))
    return DelayEstimate(
        tau_s=-slope / (2.0 * math.pi),
        stderr_s=err / (2.0 * math.pi),
        n_points=2 * k,
    )


def circle_fit(points) -> CircleFit:
    """Algebraic least-squares circle through complex points (Taubin fit).

    Solves the 3x3 symmetric eigenproblem of the Taubin formulation on
    centered data; exact for points lying exactly on a circle.
    """
    z = np.asarray(points, dtype=complex).ravel()
    if z.size < 3:
        raise FitError("circle fit needs at least 3 points")
    x, y = z.real, z.imag
    xm, ym = x.mean(), y.mean()
    u, v = x - xm, y - ym
    w = u * u + v * v
    zm = w.mean()
    scale = math.sqrt(zm)
    if not np.isfinite(scale) or scale == 0.0:
        raise FitError("degenerate circle fit: all points coincide")
    b_mat = np.column_stack([w - zm, u, v])
    m = b_mat.T @ b_mat / z.size
    d_half = np.array([2.0 * scale, 1.0, 1.0])
    s = m / np.outer(d_half, d_half)
    evals, evecs = np.linalg.eigh(s)
    q = evecs[:, 0]
    a, b, c = q / d_half
    if abs(a) * zm < 1e-12 * math.hypot(b, c) * scale:
        raise FitError("degenerate circle fit: points are collinear")
    cu = -b / (2.0 * a)
    cv = -c / (2.0 * a)
    d_coef = -a * zm
    r_sq = cu * cu + cv * cv - d_coef / a
    if r_sq <= 0 or not np.isfinite(r_sq):
        raise FitError("circle fit failed: non-positive radius")
    radius = math.sqrt(r_sq)
    center = complex(cu + xm, cv + ym)
    dist = np.abs(z - center)
    rms = float(np.sqrt(np.mean((dist - radius) ** 2)))
    return CircleFit(center=center, radius=radius, rms_residual=rms)


def phase_fit(trace: S21Trace, center: complex, fr_hint: float | None = None) -> PhaseFit:
    """Arctangent fit of the centered phase theta(f) = theta0 + 2 atan(2 Ql (1 - f/fr)).

    The trace must already be delay-corrected; ``center`` is the fitted
    circle center. ``fr_hint`` seeds the resonance location (used by the
    full pipeline to target the deepest dip when a trace carries more than
    one); without it the point of steepest phase is used. Raises FitError
    when the data carries no resonant phase winding (monotonic phase, Ql
    driven non-positive, or fr outside the span).
    """
    f = trace.freq_hz
    theta = np.unwrap(np.angle(trace.s21 - center))
    grad = np.gradient(theta, f)
    if fr_hint is None:
        idx = int(np.argmax(np.abs(grad)))
    else:
        idx = int(np.argmin(np.abs(f - fr_hint)))
    fr0 = float(f[idx])
    ql0 = abs(grad[idx]) * fr0 / 4.0
    if not np.isfinite(ql0) or ql0 <= 0:
        raise FitError("phase fit: no resonant phase slope found")
    th0 = float(theta[idx])

    def resid(p):
        th, ql, fr = p
        return th + 2.0 * np.arctan(2.0 * ql * (1.0 - f / fr)) - theta

    res = least_squares(
        resid,
        [th0, ql0, fr0],
        method="lm",
        x_scale=[1.0, ql0, fr0],
        max_nfev=4000,
    )
    th_fit, ql_fit, fr_fit = res.x
    if res.status <= 0:
        raise FitError(f"phase fit did not converge: {res.message}")
    if ql_fit <= 0 or not f[0] <= fr_fit <= f[-1]:
        raise FitError("phase fit: no resonance within the frequency span")
    rms = float(np.sqrt(np.mean(res.fun**2)))
    return PhaseFit(
        fr_hz=float(fr_fit), ql=float(ql_fit), theta0_rad=float(th_fit), rms_residual=rms
    )


def _refine(f, z, p0, x_scale, max_iter, f_center):
    # The environment phase is referenced to the span center: with the
    # f = 0 convention, phase0 and tau are degenerate through a lever arm
    # of order f/span and LM crawls along the resulting sliver valley.
    # The Jacobian is analytic; finite differences leave enough noise in
    # the normal equations for MINPACK to stall orders of magnitude above
    # the attainable residual.
    def _parts(p):
        fr, ql, qc, phi, amp, ph_c, tau = p
        w = 2.0 * np.pi * (f - f_center)
        env = amp * np.exp(1j * (ph_c - w * tau))
        detune = 1.0 + 2j * ql * (f / fr - 1.0)
        t_term = (ql / qc) * np.exp(1j * phi) / detune
        return env, t_term, detune, w

    def resid(p):
        env, t_term, _, _ = _parts(p)
        d = env * (1.0 - t_term) - z
        return np.concatenate([d.real, d.imag])

    def jac(p):
        fr, ql, qc, phi, amp, ph_c, tau = p
        env, t_term, detune, w = _parts(p)
        m = env * (1.0 - t_term)
        cols = (
            -env * t_term * 2j * ql * f / (fr * fr * detune),
            -env * t_term * (1.0 / ql - 2j * (f / fr - 1.0) / detune),
            env * t_term / qc,
            -1j * env * t_term,
            m / amp,
            1j * m,
            -1j * w * m,
        )
        out = np.empty((2 * f.size, len(cols)))
        for k, col in enumerate(cols):
            out[: f.size, k] = col.real
            out[f.size :, k] = col.imag
        return out

    return least_squares(
        resid,
        p0,
        jac=jac,
        method="lm",
        x_scale=x_scale,
        ftol=1e-12,
        xtol=1e-12,
        gtol=1e-12,
        max_nfev=max_iter * (len(p0) + 1),
    )


def fit_notch(trace: S21Trace, max_iter: int = 200) -> NotchFitResult:
    """Full notch-fit pipeline on one trace.

    Raises FitError when no resonance is present or the refinement does not
    converge. A converged fit whose derived Qi is non-positive is returned
    with qi = inf and a ``nonphysical_qi`` flag rather than silently
    clamped.
    """
    f, z = trace.freq_hz, trace.s21
    n = len(trace)
    if n < 16:
        raise FitError("notch fit needs at least 16 points")

    # dip-depth precheck against the wing noise floor
    mag = np.abs(z)
    med = float(np.median(mag))
    if med <= 0:
        raise FitError("no resonance found (zero baseline)")
    k = max(3, n // 10)
    wing_mag = np.concatenate([mag[:k], mag[-k:]])
    noise_rel = float(np.std(np.diff(wing_mag))) / math.sqrt(2.0) / med
    depth = 1.0 - float(mag.min()) / med
    if depth < max(5.0 * noise_rel, 1e-9):
        raise FitError("no resonance found (no dip above the noise floor)")

    delay = estimate_delay(trace)
    z1 = z * np.exp(2j * np.pi * f * delay.tau_s)
    try:
        circ = circle_fit(z1)
    except FitError as exc:
        raise FitError(f"no resonance found ({exc})") from exc
    if circ.radius < 5.0 * circ.rms_residual:
        raise FitError("no resonance found (circle radius within residual scatter)")

    # seed at the deepest dip: when a trace carries several resonances the
    # single-notch model is fitted to the deepest one
    fr_hint = float(f[int(np.argmin(np.abs(z1)))])
    ph = phase_fit(S21Trace(f, z1), circ.center, fr_hint=fr_hint)
    off_res = circ.center - circ.radius * np.exp(1j * ph.theta0_rad)
    amp0 = abs(off_res)
    if amp0 == 0.0:
        raise FitError("no resonance found (vanishing off-resonant baseline)")
    phase00 = float(np.angle(off_res))
    qc0 = ph.ql * amp0 / (2.0 * circ.radius)
    phi0 = _wrap_angle(float(np.angle((off_res - circ.center) / off_res)))

    f_center = 0.5 * (f[0] + f[-1])
    phase_c0 = phase00 - 2.0 * math.pi * f_center * delay.tau_s
    p0 = np.array([ph.fr_hz, ph.ql, qc0, phi0, amp0, phase_c0, delay.tau_s])
    tau_scale = max(abs(delay.tau_s), 1.0 / (2.0 * math.pi * (f[-1] - f[0])))
    x_scale = np.array([ph.fr_hz, ph.ql, qc0, 1.0, amp0, 1.0, tau_scale])
    res = _refine(f, z, p0, x_scale, max_iter, f_center)
    if res.status <= 0:
        raise FitError(f"notch refinement did not converge: {res.message}")

    fr, ql, qc, phi, amp, ph_c, tau = res.x
    ph0 = ph_c + 2.0 * math.pi * f_center * tau
    if amp < 0:
        amp, ph0 = -amp, ph0 + math.pi
    if qc < 0:
        qc, phi = -qc, phi + math.pi
    phi = _wrap_angle(phi)
    ph0 = _wrap_angle(float(ph0))
    if ql <= 0 or fr <= 0:
        raise FitError("notch refinement converged to unphysical fr or Ql")
    if not abs(phi) < math.pi / 2:
        raise FitError(
            f"notch refinement converged to |phi| = {abs(phi):.3f} >= pi/2"
        )
    params = NotchParams(
        fr_hz=float(fr),
        ql=float(ql),
        qc_mag=float(qc),
        phi_rad=float(phi),
        amp=float(amp),
        phase0_rad=float(ph0),
        tau_s=float(tau),
    )

    flags: tuple[str, ...] = ()
    qi = params.qi
    if not params.is_physical:
        flags = ("nonphysical_qi",)
        qi = math.inf

    m = 2 * n
    dof = max(m - len(res.x), 1)
    ssr = 2.0 * res.cost
    s2 = ssr / dof
    jtj = res.jac.T @ res.jac
    try:
        cov = s2 * np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        cov = s2 * np.linalg.pinv(jtj)
    perr = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    stderr = dict(zip(PARAM_NAMES, (float(e) for e in perr)))
    # phase0 = phase_c + 2 pi f_center tau: propagate the pair's covariance
    lever = 2.0 * math.pi * f_center
    var_ph0 = cov[5, 5] + lever * lever * cov[6, 6] + 2.0 * lever * cov[5, 6]
    stderr["phase0_rad"] = float(math.sqrt(max(var_ph0, 0.0)))
    if params.is_physical:
        # delta method for Qi over the (ql, qc, phi) block
        grad_inv = np.array(
            [
                -1.0 / params.ql**2,
                math.cos(params.phi_rad) / params.qc_mag**2,
                math.sin(params.phi_rad) / params.qc_mag,
            ]
        )
        g = -(qi**2) * grad_inv
        sub = cov[np.ix_([1, 2, 3], [1, 2, 3])]
        stderr["qi"] = float(np.sqrt(max(g @ sub @ g, 0.0)))
    else:
        stderr["qi"] = math.inf

    rms = math.sqrt(ssr / m)
    return NotchFitResult(
        params=params,
        qi=qi,
        stderr=stderr,
        rms_residual=rms,
        n_points=n,
        flags=flags,
    )


def resonance_shift(
    fr_series: list[tuple[float, float]], t_ref: float
) -> list[tuple[float, float]]:
    """Frequency shift relative to the reference temperature.

    Returns [(T, fr(T) - fr(t_ref)), ...] in input order, with the
    reference taken at the series point nearest ``t_ref``.
    """
    if not fr_series:
        raise ValueError("empty resonance series")
    temps = np.array([t for t, _ in fr_series], dtype=float)
    ref_idx = int(np.argmin(np.abs(temps - t_ref)))
    fr_ref = fr_series[ref_idx][1]
    return [(t, fr - fr_ref) for t, fr in fr_series]
