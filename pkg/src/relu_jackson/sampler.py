"""Construction of a shallow ReLU network from a smoothed Fourier target.

The pipeline rests on an exact integral identity that writes ``exp(iz)`` as a
ReLU ridge integral plus an affine part.  Plugging the identity into the
coefficient sum of a smoothed target turns the target (minus an affine part)
into the expectation of ``sigma(z * alpha_k . x - t)`` atoms under a density
over ``(sign z, shift t, frequency k)``.  Sampling the atoms, stratified so
that atoms in one stratum are nearly interchangeable as functions of x,
produces the network units; two or three exact units realize the affine part.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .jackson import apply_jackson
from .network import (
    ORIGIN_AFFINE,
    ORIGIN_SAMPLED,
    NetworkMeta,
    ShallowNetwork,
    Units,
)
from .spectral import variation
from .targets import FourierTarget

_SIGNS = (-1.0, 1.0)

# Stream tag separating the unstratified sampler from the per-stratum
# substreams (seed, stratum_index); stratum indices never reach this value.
_PLAIN_STREAM_TAG = 0x9E3779B9


def _validate_seed(seed: int):
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError("seed must be a non-negative integer")


# ---------------------------------------------------------------------------
# The ReLU ridge identity
# ---------------------------------------------------------------------------

def _simpson(f, a: float, b: float, panels: int) -> complex:
    """Composite Simpson with an even panel count."""
    n = max(2, panels + panels % 2)
    x = np.linspace(a, b, n + 1)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    h = (b - a) / n
    vals = f(x)
    return complex(np.sum(w * vals) * h / 3.0)


def identity_residual(z: float, c: float, panels: int) -> float:
    """Quadrature residual of the ridge identity for exp(iz) on [-c, c].

    The identity states ``exp(iz) - iz - 1`` equals minus the integral over
    ``u in [0, c]`` of ``relu(z-u) e^{iu} + relu(-z-u) e^{-iu}``.  The
    integrand is smooth except for a kink at ``u = |z|``, so the range is
    split there and each piece gets a share of ``panels`` Simpson panels.
    """
    if panels < 2:
        raise ValueError("panels must be >= 2")
    if abs(z) > c:
        raise ValueError("identity requires |z| <= c")
    lhs = cmath.exp(1j * z) - 1j * z - 1.0

    def integrand(u):
        return np.maximum(z - u, 0.0) * np.exp(1j * u) + np.maximum(-z - u, 0.0) * np.exp(-1j * u)

    split = abs(z)
    pieces = [(a, b) for a, b in ((0.0, split), (split, c)) if b > a]
    total = 0j
    for a, b in pieces:
        share = max(2, int(round(panels * (b - a) / c)))
        total += _simpson(integrand, a, b, share)
    rhs = -total
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Sampling density over (sign, shift, frequency)
# ---------------------------------------------------------------------------

def _abs_cos_primitive(u):
    """F(u) = integral of |cos| from 0 to u, in closed form."""
    u = np.asarray(u, dtype=float)
    branch = np.floor((u + np.pi / 2.0) / np.pi)
    return 2.0 * branch + np.sin(u - branch * np.pi)


@dataclass(frozen=True)
class SamplingDensity:
    """Atom density p(z, t, k) proportional to |c(k)| |k|_1^2 |cos(z w_k t + b_k)|.

    ``b_k`` is the coefficient phase, ``w_k = pi |k|_1`` the phase slope, and
    ``alpha_k = k / (pi |k|_1)`` the unit direction each frequency
    contributes.  ``masses[zi, j]`` is the unnormalized mass of the
    ``(sign, frequency)`` pair with the shift integrated out; ``v`` is the
    total mass, i.e. the estimator scale.
    """

    image: FourierTarget
    modes: np.ndarray
    magnitudes: np.ndarray
    phases: np.ndarray
    l1: np.ndarray
    omegas: np.ndarray
    alphas: np.ndarray
    masses: np.ndarray
    v: float

    def __post_init__(self):
        for arr in (self.modes, self.magnitudes, self.phases, self.l1, self.omegas, self.alphas, self.masses):
            arr.setflags(write=False)

    @property
    def mode_count(self) -> int:
        return self.modes.shape[0]

    @property
    def is_degenerate(self) -> bool:
        return self.mode_count == 0


def _interval_abs_cos_integral(z, omega, b, lo, hi):
    """Integral of |cos(z*omega*t + b)| over [lo, hi], vectorized."""
    slope = z * omega
    upper = _abs_cos_primitive(slope * hi + b)
    lower = _abs_cos_primitive(slope * lo + b)
    return (upper - lower) / slope


def build_density(image: FourierTarget) -> SamplingDensity:
    """Per-(sign, frequency) masses and the normalization of the atom density.

    The shift integral of |cos| is evaluated in closed form through the
    piecewise antiderivative, never by quadrature.  An image with no
    oscillatory modes yields a degenerate density (the network is purely
    affine); the flag is exposed as ``is_degenerate``.
    """
    keep = (np.abs(image.modes).sum(axis=1) > 0) & (image.coeffs != 0)
    modes = image.modes[keep]
    coeffs = image.coeffs[keep]
    magnitudes = np.abs(coeffs)
    phases = np.angle(coeffs)
    l1 = np.abs(modes).sum(axis=1).astype(float)
    omegas = np.pi * l1
    alphas = modes / (np.pi * l1[:, None]) if modes.shape[0] else np.zeros((0, image.d))
    masses = np.zeros((2, modes.shape[0]))
    base = np.pi**2 * magnitudes * l1**2
    for zi, z in enumerate(_SIGNS):
        masses[zi] = base * _interval_abs_cos_integral(z, omegas, phases, 0.0, 1.0)
    v = math.fsum(float(x) for x in masses.ravel())
    return SamplingDensity(
        image=image,
        modes=modes,
        magnitudes=magnitudes,
        phases=phases,
        l1=l1,
        omegas=omegas,
        alphas=alphas,
        masses=masses,
        v=v,
    )


# ---------------------------------------------------------------------------
# Stratification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Stratum:
    """One cell of the proportionate-allocation partition.

    A stratum fixes the sign z, a shift bin of width at most epsilon/(d+1), a
    direction cell of the same side length, and the value of the atom sign
    ``s = -sgn(cos(z w t + b))``.  Its atoms are (frequency, sub-interval)
    pairs on which ``s`` is constant, so any two atoms give ReLU features
    within epsilon of each other uniformly over the cube.
    """

    z: float
    bin_index: int
    t_lo: float
    t_hi: float
    cell: tuple[int, ...]
    sign: float
    mode_index: np.ndarray
    piece_lo: np.ndarray
    piece_hi: np.ndarray
    piece_mass: np.ndarray
    mass: float
    share: float
    target_count: float
    count: int

    def __post_init__(self):
        for arr in (self.mode_index, self.piece_lo, self.piece_hi, self.piece_mass):
            arr.setflags(write=False)


@dataclass(frozen=True)
class SamplingPlan:
    m: int
    m_prime: int
    epsilon: float
    delta: float
    strata: tuple[Stratum, ...]

    @property
    def strata_count(self) -> int:
        return len(self.strata)

    @property
    def total_count(self) -> int:
        return sum(s.count for s in self.strata)

    @property
    def shares_total(self) -> float:
        return math.fsum(s.share for s in self.strata)


def allocation_width(m: int, d: int) -> tuple[float, float]:
    """(epsilon, delta): the oscillation budget and the cell side per axis."""
    m_prime = math.ceil(m / 4)
    eps = 2.0 * (d + 1) * math.pi ** (-1.0 + 1.0 / d) / m_prime ** (1.0 / d)
    return eps, eps / (d + 1)


def _cos_zero_shifts(z: float, omega: float, b: float) -> np.ndarray:
    """Interior zeros of cos(z*omega*t + b) for t in (0, 1), ascending."""
    phi0, phi1 = b, z * omega + b
    lo, hi = min(phi0, phi1), max(phi0, phi1)
    n0 = math.ceil((lo - math.pi / 2.0) / math.pi)
    n1 = math.floor((hi - math.pi / 2.0) / math.pi)
    if n1 < n0:
        return np.zeros(0)
    ts = (math.pi / 2.0 + math.pi * np.arange(n0, n1 + 1) - b) / (z * omega)
    ts = ts[(ts > 0.0) & (ts < 1.0)]
    return np.sort(ts)


def build_strata(density: SamplingDensity, m: int) -> SamplingPlan:
    """Proportionate-allocation plan for a width-m network.

    Strata are the product of: sign z; shift bins [j*delta, (j+1)*delta)
    clipped at 1; direction cells obtained by flooring each coordinate of
    alpha_k to the delta grid; and the atom sign s, with every shift bin
    additionally split at the zeros of cos(z w t + b) so s is constant per
    atom.  Each nonempty stratum draws ceil(m' * share) samples, with
    m' = ceil(m / 4).
    """
    if density.is_degenerate:
        raise ValueError("empty density: the image has no oscillatory modes")
    if m < 8:
        raise ValueError("width must be >= 8")
    d = density.image.d
    m_prime = math.ceil(m / 4)
    eps, delta = allocation_width(m, d)
    n_bins = math.ceil(1.0 / delta)
    edges = np.minimum(delta * np.arange(n_bins + 1), 1.0)
    cells = np.floor(density.alphas / delta).astype(np.int64)

    bucket: dict[tuple, list[tuple[int, float, float, float]]] = {}
    for z in _SIGNS:
        for j in range(density.mode_count):
            omega = float(density.omegas[j])
            b = float(density.phases[j])
            zero_ts = _cos_zero_shifts(z, omega, b)
            bounds = np.unique(np.concatenate([edges, zero_ts]))
            lo, hi = bounds[:-1], bounds[1:]
            mid = 0.5 * (lo + hi)
            signs = -np.sign(np.cos(z * omega * mid + b))
            base = np.pi**2 * float(density.magnitudes[j]) * float(density.l1[j]) ** 2
            masses = base * _interval_abs_cos_integral(z, omega, b, lo, hi)
            bins = np.searchsorted(edges, lo, side="right") - 1
            cell = tuple(int(x) for x in cells[j])
            for a in range(lo.shape[0]):
                if signs[a] == 0.0 or masses[a] <= 0.0:
                    continue
                key = (z, int(bins[a]), cell, float(signs[a]))
                bucket.setdefault(key, []).append((j, float(lo[a]), float(hi[a]), float(masses[a])))

    strata = []
    for key in sorted(bucket):
        z, bin_index, cell, sign = key
        pieces = bucket[key]
        mass = math.fsum(p[3] for p in pieces)
        if mass <= 0.0:
            continue
        share = mass / density.v
        target_count = m_prime * share
        strata.append(
            Stratum(
                z=z,
                bin_index=bin_index,
                t_lo=float(edges[bin_index]),
                t_hi=float(edges[bin_index + 1]),
                cell=cell,
                sign=sign,
                mode_index=np.array([p[0] for p in pieces], dtype=np.int64),
                piece_lo=np.array([p[1] for p in pieces]),
                piece_hi=np.array([p[2] for p in pieces]),
                piece_mass=np.array([p[3] for p in pieces]),
                mass=mass,
                share=share,
                target_count=target_count,
                count=math.ceil(target_count),
            )
        )
    plan = SamplingPlan(m=m, m_prime=m_prime, epsilon=eps, delta=delta, strata=tuple(strata))
    # Ceiling rounding adds less than one draw per stratum.
    assert plan.total_count <= plan.m_prime + plan.strata_count
    return plan


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def _invert_shift(z, omega, b, lo, hi, u):
    """Inverse-CDF draw of t with density |cos(z*omega*t + b)| on [lo, hi].

    Valid when cos keeps one sign on the interval, so the phase stays inside
    a single half-period and the antiderivative inverts through arcsin.
    """
    slope = z * omega
    phi_lo = slope * lo + b
    phi_hi = slope * hi + b
    f_lo = _abs_cos_primitive(phi_lo)
    f_hi = _abs_cos_primitive(phi_hi)
    y = f_lo + u * (f_hi - f_lo)
    branch = np.floor((0.5 * (phi_lo + phi_hi) + np.pi / 2.0) / np.pi)
    phi = branch * np.pi + np.arcsin(np.clip(y - 2.0 * branch, -1.0, 1.0))
    return np.clip((phi - b) / slope, lo, hi)


def _invert_shift_full(z, omega, b, u):
    """Inverse-CDF draw of t with density |cos(z*omega*t + b)| on [0, 1]."""
    slope = z * omega
    f_lo = _abs_cos_primitive(b)
    f_hi = _abs_cos_primitive(slope + b)
    y = f_lo + u * (f_hi - f_lo)
    branch = np.floor((y + 1.0) / 2.0)
    phi = branch * np.pi + np.arcsin(np.clip(y - 2.0 * branch, -1.0, 1.0))
    return np.clip((phi - b) / slope, 0.0, 1.0)


def stratified_sample(plan: SamplingPlan, density: SamplingDensity, seed: int) -> Units:
    """Draw every stratum's allocation and weight the units for the estimator.

    Stratum i uses the substream keyed by (seed, i), so strata could be
    sampled concurrently without changing the result.  Each atom (z, t, k)
    becomes the unit ``beta * relu((z alpha_k) . x - t)`` with
    ``beta = v * m_i / (m' * n_i) * s``.
    """
    _validate_seed(seed)
    d = density.image.d
    blocks_alpha, blocks_beta, blocks_bias = [], [], []
    for i, st in enumerate(plan.strata):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, i)))
        u = rng.random((st.count, 2))
        cum = np.cumsum(st.piece_mass)
        pick = np.searchsorted(cum, u[:, 0] * cum[-1], side="right")
        pick = np.minimum(pick, st.piece_mass.shape[0] - 1)
        mode = st.mode_index[pick]
        t = _invert_shift(
            st.z,
            density.omegas[mode],
            density.phases[mode],
            st.piece_lo[pick],
            st.piece_hi[pick],
            u[:, 1],
        )
        beta = density.v * st.target_count / (plan.m_prime * st.count) * st.sign
        blocks_alpha.append(st.z * density.alphas[mode])
        blocks_beta.append(np.full(st.count, beta))
        blocks_bias.append(t)
    if not blocks_alpha:
        return Units.empty(d)
    n = sum(b.shape[0] for b in blocks_beta)
    return Units(
        alphas=np.concatenate(blocks_alpha).reshape(n, d),
        betas=np.concatenate(blocks_beta),
        biases=np.concatenate(blocks_bias),
        origins=np.full(n, ORIGIN_SAMPLED, dtype="<U7"),
    )


def plain_sample(density: SamplingDensity, n: int, seed: int) -> Units:
    """Unstratified baseline: n i.i.d. atoms with weights +-v/n."""
    if n < 1:
        raise ValueError("sample count must be >= 1")
    if density.is_degenerate:
        raise ValueError("empty density: the image has no oscillatory modes")
    _validate_seed(seed)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, _PLAIN_STREAM_TAG)))
    flat = density.masses.ravel()
    cum = np.cumsum(flat)
    u = rng.random((n, 2))
    pick = np.searchsorted(cum, u[:, 0] * cum[-1], side="right")
    pick = np.minimum(pick, flat.shape[0] - 1)
    zi, mode = np.divmod(pick, density.mode_count)
    z = np.where(zi == 0, _SIGNS[0], _SIGNS[1])
    omega = density.omegas[mode]
    b = density.phases[mode]
    t = _invert_shift_full(z, omega, b, u[:, 1])
    s = -np.sign(np.cos(z * omega * t + b))
    return Units(
        alphas=z[:, None] * density.alphas[mode],
        betas=density.v / n * s,
        biases=t,
        origins=np.full(n, ORIGIN_SAMPLED, dtype="<U7"),
    )


# ---------------------------------------------------------------------------
# Affine part and end-to-end construction
# ---------------------------------------------------------------------------

def affine_part(image: FourierTarget) -> tuple[np.ndarray, float]:
    """(w, c) with A(x) = w . x + c: the non-sampled remainder of the image.

    ``w = -sum Im(c(k)) k`` and ``c = sum Re(c(k))``; both are real because
    the coefficients are Hermitian-symmetric.
    """
    if image.mode_count == 0:
        return np.zeros(image.d), 0.0
    w = -np.einsum("m,md->d", image.coeffs.imag, image.modes.astype(float))
    c = math.fsum(float(x) for x in image.coeffs.real)
    return w, c


def affine_units(image: FourierTarget) -> Units:
    """At most three exact units realizing the affine part.

    The linear term w . x uses the identity u = relu(u) - relu(-u) scaled so
    the direction has unit l1 norm; the constant uses a single unit with zero
    direction and bias -1, i.e. ``c * relu(0 . x + 1)``.
    """
    w, c = affine_part(image)
    rows = []
    w_norm = float(np.abs(w).sum())
    if w_norm > 0.0:
        unit_dir = w / w_norm
        rows.append((unit_dir, w_norm, 0.0, ORIGIN_AFFINE))
        rows.append((-unit_dir, -w_norm, 0.0, ORIGIN_AFFINE))
    if c != 0.0:
        rows.append((np.zeros(image.d), c, -1.0, ORIGIN_AFFINE))
    return Units.build(image.d, rows)


def select_bandwidth(m: int, d: int, r: int) -> int:
    """Smoothing bandwidth for a width-m network: floor(m^((d+2)/(d*max(2r, d+4)))).

    The exponent balances the smoothing error against the sampling error;
    the result is clamped to at least 1 so small widths stay usable.
    """
    if m < 1 or d < 1 or r < 1:
        raise ValueError("m, d, r must be >= 1")
    expo = (d + 2.0) / (d * max(2 * r, d + 4))
    return max(1, math.floor(m**expo))


def construct(
    target: FourierTarget,
    r: int,
    m: int,
    seed: int,
    bandwidth: int | None = None,
    method: str = "stratified",
) -> ShallowNetwork:
    """End-to-end pipeline: smooth, build density and plan, sample, assemble.

    ``method`` selects stratified sampling (default) or the plain Monte Carlo
    baseline with the same unit budget.  A degenerate density (no oscillatory
    modes) produces the exact affine network.  The result is bit-reproducible
    given (target, r, m, seed).
    """
    if r < 1:
        raise ValueError("order must be >= 1")
    if m < 8:
        raise ValueError("width must be >= 8")
    if method not in ("stratified", "plain"):
        raise ValueError(f"unknown sampling method {method!r}")
    _validate_seed(seed)
    n = bandwidth if bandwidth is not None else select_bandwidth(m, target.d, r)
    if n < 1:
        raise ValueError("bandwidth must be >= 1")
    image = apply_jackson(target, n, r)
    v2 = variation(image, 2)
    density = build_density(image)
    if density.is_degenerate:
        sampled = Units.empty(target.d)
        m_prime = math.ceil(m / 4)
        strata_count = 0
    else:
        plan = build_strata(density, m)
        m_prime = plan.m_prime
        strata_count = plan.strata_count
        if method == "stratified":
            sampled = stratified_sample(plan, density, seed)
        else:
            sampled = plain_sample(density, plan.total_count, seed)
    units = Units.concat([sampled, affine_units(image)])
    meta = NetworkMeta(
        v=density.v,
        bandwidth=n,
        v2=v2,
        r=r,
        seed=seed,
        m_requested=m,
        m_prime=m_prime,
        strata_count=strata_count,
        sampled_count=len(sampled),
    )
    return ShallowNetwork(d=target.d, units=units, meta=meta)
