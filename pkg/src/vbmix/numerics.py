"""Special functions and log-space primitives for the variational updates.

digamma and log_gamma are evaluated by upward recurrence to x >= 10 followed
by the Stirling-type asymptotic series; the coefficients are B_2n/(2n(2n-1))
for log Gamma and B_2n/(2n) for digamma.  All functions accept scalars or
numpy arrays elementwise; responsibilities and densities elsewhere in the
package are combined with log_sum_exp so that near-empty mixture components
never underflow.
"""

import numpy as np

# Euler-Mascheroni constant and (1/2) log(2 pi).
EULER_GAMMA = 0.57721566490153286061
_HALF_LOG_2PI = 0.91893853320467274178

# Recurrence target for the asymptotic series.
_SHIFT = 10.0

# B_2n / (2n (2n - 1)) for n = 1..7: coefficients of x^(1-2n) in the
# log Gamma asymptotic series.
_LGAMMA_SERIES = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)

# B_2n / (2n) for n = 1..7: coefficients of x^(-2n) in the digamma series.
_DIGAMMA_SERIES = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def _as_positive_array(x, name):
    arr = np.asarray(x, dtype=float)
    if arr.size and not np.all(arr > 0.0):
        raise ValueError(f"{name} requires strictly positive arguments")
    return arr


def log_gamma(x):
    """log Gamma(x) for x > 0 (scalar or elementwise on arrays)."""
    arr = _as_positive_array(x, "log_gamma")
    scalar = arr.ndim == 0
    z = np.atleast_1d(arr).astype(float).copy()
    shift = np.zeros_like(z)
    # lgamma(x) = lgamma(x + m) - sum_{i<m} log(x + i); at most 10 steps.
    for _ in range(int(_SHIFT)):
        small = z < _SHIFT
        if not small.any():
            break
        shift[small] -= np.log(z[small])
        z[small] += 1.0
    inv2 = 1.0 / (z * z)
    series = np.full_like(z, _LGAMMA_SERIES[-1])
    for c in _LGAMMA_SERIES[-2::-1]:
        series = c + inv2 * series
    out = (z - 0.5) * np.log(z) - z + _HALF_LOG_2PI + series / z + shift
    return float(out[0]) if scalar else out.reshape(arr.shape)


def digamma(x):
    """Psi(x) = d/dx log Gamma(x) for x > 0 (scalar or elementwise).

    Satisfies 1/(2x) < log x - Psi(x) < 1/x on the whole positive axis.
    """
    arr = _as_positive_array(x, "digamma")
    scalar = arr.ndim == 0
    z = np.atleast_1d(arr).astype(float).copy()
    shift = np.zeros_like(z)
    # Psi(x) = Psi(x + m) - sum_{i<m} 1/(x + i)
    for _ in range(int(_SHIFT)):
        small = z < _SHIFT
        if not small.any():
            break
        shift[small] -= 1.0 / z[small]
        z[small] += 1.0
    inv2 = 1.0 / (z * z)
    series = np.full_like(z, _DIGAMMA_SERIES[-1])
    for c in _DIGAMMA_SERIES[-2::-1]:
        series = c + inv2 * series
    out = np.log(z) - 0.5 / z - inv2 * series + shift
    return float(out[0]) if scalar else out.reshape(arr.shape)


def log_sum_exp(v, axis=None):
    """log sum_i exp(v_i), shift-stabilized.

    ``v`` must be nonempty; -inf entries are allowed (they contribute zero
    mass) and an all--inf slice yields -inf rather than NaN.
    """
    arr = np.asarray(v, dtype=float)
    if arr.size == 0:
        raise ValueError("log_sum_exp of an empty collection")
    m = np.max(arr, axis=axis, keepdims=True)
    shift = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = shift + np.log(np.sum(np.exp(arr - shift), axis=axis, keepdims=True))
    if axis is None:
        return float(out.reshape(())[()])
    return np.squeeze(out, axis=axis)


def dirichlet_kl(alpha, phi0):
    """KL( Dir(alpha) || Dir(phi0, ..., phi0) ) in closed form.

    Equals log Gamma(sum a) - sum log Gamma(a_k) - log Gamma(K phi0)
    + K log Gamma(phi0) + sum (a_k - phi0)(Psi(a_k) - Psi(sum a)).
    The result is clamped at zero: the expression is nonnegative
    analytically but can round to ~-1e-16 when alpha == phi0.
    """
    a = np.asarray(alpha, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("alpha must be a nonempty 1-D vector")
    if not np.all(a > 0.0) or not phi0 > 0.0:
        raise ValueError("dirichlet_kl requires alpha > 0 and phi0 > 0")
    k = a.size
    total = float(a.sum())
    val = (
        log_gamma(total)
        - float(np.sum(log_gamma(a)))
        - log_gamma(k * phi0)
        + k * log_gamma(phi0)
        + float(np.sum((a - phi0) * (digamma(a) - digamma(total))))
    )
    return max(val, 0.0)


def dirichlet_kl_general(alpha, beta):
    """KL( Dir(alpha) || Dir(beta) ) for arbitrary positive concentrations."""
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise ValueError("alpha and beta must be matching nonempty 1-D vectors")
    if not (np.all(a > 0.0) and np.all(b > 0.0)):
        raise ValueError("concentrations must be strictly positive")
    total_a = float(a.sum())
    val = (
        log_gamma(total_a)
        - float(np.sum(log_gamma(a)))
        - log_gamma(float(b.sum()))
        + float(np.sum(log_gamma(b)))
        + float(np.sum((a - b) * (digamma(a) - digamma(total_a))))
    )
    return max(val, 0.0)
