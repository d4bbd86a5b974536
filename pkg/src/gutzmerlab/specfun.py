"""Stable special-function evaluation: Hermite, Laguerre, normalized Bessel.

All evaluators work on the weighted / normalized functions directly (never on
bare orthogonal polynomials followed by normalization), so they stay finite
far past the degrees where naive evaluation overflows:

* ``hermite_phi`` uses the three-term recurrence on the L2-normalized
  Hermite functions h_m(x) = H_m(x) e^{-x^2/2} / sqrt(2^m m! sqrt(pi)).
* ``laguerre`` runs the upward Laguerre recurrence (complex arguments OK).
* ``bessel_j_norm`` evaluates j_nu(s) = s^{-nu} J_nu(s) through its entire
  power series in s^2, which on the imaginary axis is a positive-term
  modified-Bessel series (no cancellation, growth ~ e^{|s|}).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, gamma

import numpy as np

HERMITE_DEGREE_CAP = 120
LAGUERRE_DEGREE_CAP = 512


class SpecfunError(ValueError):
    pass


@dataclass(frozen=True)
class MultiIndex:
    """Multi-index alpha in N^n."""

    entries: tuple

    def __init__(self, entries):
        entries = tuple(int(e) for e in np.atleast_1d(entries))
        if len(entries) < 1:
            raise SpecfunError("multi-index needs at least one entry")
        if any(e < 0 for e in entries):
            raise SpecfunError("multi-index entries must be non-negative")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def degree(self) -> int:
        return sum(self.entries)


@dataclass(frozen=True)
class LaguerreArg:
    """Argument bundle for the Laguerre functions phi_k^lambda.

    order is the Laguerre type n-1 for ambient dimension n; rho is the
    generalized squared radius (real >= 0 at real points, real <= 0 at purely
    imaginary points, complex in general).
    """

    k: int
    order: int
    rho: complex

    def __post_init__(self):
        if self.k < 0:
            raise SpecfunError("Laguerre index k must be >= 0")
        if self.order < 0:
            raise SpecfunError("Laguerre order must be >= 0")


def hermite_fn_1d(m: int, x):
    """Normalized 1-D Hermite function h_m(x), stable weighted recurrence."""
    if m < 0:
        raise SpecfunError("Hermite degree must be >= 0")
    if m > HERMITE_DEGREE_CAP:
        raise SpecfunError(f"degree cap exceeded: Hermite degree {m} > {HERMITE_DEGREE_CAP}")
    x = np.asarray(x)
    h0 = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if m == 0:
        return h0
    h1 = np.sqrt(2.0) * x * h0
    hm1, hm = h0, h1
    for k in range(1, m):
        hp = np.sqrt(2.0 / (k + 1.0)) * x * hm - np.sqrt(k / (k + 1.0)) * hm1
        hm1, hm = hm, hp
    return hm


def hermite_poly_normalized_all(max_deg: int, x):
    """h_m(x) e^{x^2/2}: the polynomial parts, same recurrence, no weight.

    Used when the Gaussian weight has been folded into a quadrature rule.
    """
    if max_deg > HERMITE_DEGREE_CAP:
        raise SpecfunError(f"degree cap exceeded: Hermite degree {max_deg} > {HERMITE_DEGREE_CAP}")
    x = np.asarray(x, dtype=complex)
    out = np.empty((max_deg + 1,) + x.shape, dtype=complex)
    out[0] = np.pi ** -0.25 * np.ones_like(x)
    if max_deg >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for k in range(1, max_deg):
        out[k + 1] = np.sqrt(2.0 / (k + 1.0)) * x * out[k] - np.sqrt(k / (k + 1.0)) * out[k - 1]
    return out


def hermite_phi(alpha, x) -> float:
    """Phi_alpha(x) = prod_j h_{alpha_j}(x_j) for alpha in N^n, x in R^n."""
    alpha = alpha if isinstance(alpha, MultiIndex) else MultiIndex(alpha)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape[-1] != alpha.n:
        raise SpecfunError(f"dimension mismatch: alpha has n={alpha.n}, x has {x.shape[-1]}")
    if not np.all(np.isfinite(x)):
        raise SpecfunError("non-finite evaluation point")
    out = 1.0
    for j, aj in enumerate(alpha.entries):
        out = out * hermite_fn_1d(aj, x[..., j])
    return out


def hermite_phi_scaled(alpha, lam: float, x) -> float:
    """Phi_alpha^lambda(x) = |lambda|^{n/4} Phi_alpha(|lambda|^{1/2} x)."""
    if lam == 0:
        raise SpecfunError("zero central parameter")
    alpha = alpha if isinstance(alpha, MultiIndex) else MultiIndex(alpha)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    al = abs(lam)
    return al ** (alpha.n / 4.0) * hermite_phi(alpha, np.sqrt(al) * x)


def laguerre(k: int, order: int, s):
    """Laguerre polynomial L_k^order(s) by the upward three-term recurrence."""
    if k < 0 or order < 0:
        raise SpecfunError("Laguerre indices must be non-negative")
    if k > LAGUERRE_DEGREE_CAP:
        raise SpecfunError(f"degree cap exceeded: Laguerre k {k} > {LAGUERRE_DEGREE_CAP}")
    s_arr = np.asarray(s)
    scalar = s_arr.ndim == 0
    s_arr = np.atleast_1d(s_arr)
    L0 = np.ones_like(s_arr)
    if k == 0:
        return L0[0] if scalar else L0
    L1 = 1.0 + order - s_arr
    if k == 1:
        return L1[0] if scalar else L1
    lm1, lm = L0, L1
    for m in range(1, k):
        lp = ((2.0 * m + order + 1.0 - s_arr) * lm - (m + order) * lm1) / (m + 1.0)
        lm1, lm = lm, lp
    return lm[0] if scalar else lm


def laguerre_all(kmax: int, order: int, s):
    """L_m^order(s) for m = 0..kmax stacked on a new leading axis."""
    if kmax > LAGUERRE_DEGREE_CAP:
        raise SpecfunError(f"degree cap exceeded: Laguerre k {kmax} > {LAGUERRE_DEGREE_CAP}")
    s = np.asarray(s)
    out = np.empty((kmax + 1,) + s.shape, dtype=s.dtype if s.dtype.kind == "c" else float)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = 1.0 + order - s
    for m in range(1, kmax):
        out[m + 1] = ((2.0 * m + order + 1.0 - s) * out[m] - (m + order) * out[m - 1]) / (m + 1.0)
    return out


def laguerre_phi(arg: LaguerreArg, lam: float):
    """phi_k^lambda at generalized squared radius rho:

        L_k^{n-1}( |lambda| rho / 2 ) e^{ -|lambda| rho / 4 }

    For a real point (x,u), rho = |x|^2 + |u|^2; for the complexified point
    (2iy, 2iv), rho = -4 (|y|^2 + |v|^2).  The |lambda| in the exponent makes
    the family an eigenfamily of the twisted Laplacian and keeps Plancherel
    and inversion mutually consistent.
    """
    if lam == 0:
        raise SpecfunError("zero central parameter")
    al = abs(lam)
    s = 0.5 * al * arg.rho
    val = laguerre(arg.k, arg.order, s) * np.exp(-0.25 * al * arg.rho)
    if np.asarray(arg.rho).dtype.kind != "c":
        return np.real(val)
    return val


def bessel_j_norm(order: int, s):
    """Normalized Bessel j_nu(s) = s^{-nu} J_nu(s), entire in s^2.

    The removable singularity at s = 0 takes the series value 1/(2^nu nu!).
    On the imaginary axis s = it the series has positive terms and equals
    t^{-nu} I_nu(t): real, positive, increasing, growth ~ e^{|t|}.
    """
    if order < 0:
        raise SpecfunError("Bessel order must be >= 0")
    return _bessel_j_norm_real_order(float(order), s)


def _bessel_j_norm_real_order(nu: float, s):
    """Series evaluation of s^{-nu} J_nu(s); nu real >= 0, s complex array."""
    s = np.asarray(s)
    scalar = s.ndim == 0
    w = -np.atleast_1d(s).astype(complex) ** 2 / 4.0  # series variable
    term = np.full(w.shape, 1.0 / (2.0 ** nu * gamma(nu + 1.0)), dtype=complex)
    total = term.copy()
    for m in range(1, 600):
        term = term * w / (m * (nu + m))
        total += term
        if np.max(np.abs(term)) <= 1e-18 * max(np.max(np.abs(total)), 1e-300):
            break
    out = total
    # real where the series is manifestly real (real or purely imaginary s)
    s1 = np.atleast_1d(s)
    if s1.dtype.kind != "c" or np.all(np.abs(s1.real) < 1e-300):
        out = np.real(out)
    return out[0] if scalar else out


def hilb_compare(k: int, lam: float, r: float, n: int = 1) -> float:
    """Relative gap between phi_k^lambda(2iy,2iv) and its Bessel surrogate.

    Compares the Laguerre value at |(y,v)| = r with
    C_k j_{n-1}(2i sqrt((2k+n)|lam|) r), where C_k makes the two sides agree
    at r = 0 (C_k = binom(k+n-1, k) / j_{n-1}(0); at n = 1 this is exactly
    the binomial since j_0(0) = 1).  Diagnostic only.
    """
    if lam == 0:
        raise SpecfunError("zero central parameter")
    if r < 0:
        raise SpecfunError("radius must be >= 0")
    al = abs(lam)
    phi = laguerre_phi(LaguerreArg(k, n - 1, -4.0 * r * r), lam)
    j0val = bessel_j_norm(n - 1, 0.0)
    ck = comb(k + n - 1, k) / j0val
    jval = ck * np.real(bessel_j_norm(n - 1, 2j * np.sqrt((2 * k + n) * al) * r))
    return float(abs(phi - jval) / abs(phi))


def binom_weight(k: int, n: int) -> float:
    """k!(n-1)!/(k+n-1)!: the reciprocal multiplicity of the k-th fan level."""
    return 1.0 / comb(k + n - 1, k)
