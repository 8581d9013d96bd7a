"""Certified mean-square convergence envelopes for swept block iterations.

The central object is the scalar recursion

    a_{n+1} + s_n  <=  chi_n * a_n + f_n

with nonnegative step factors ``chi_n``, forcing ``f_n``, and slack ``s_n``.
Unrolling it gives the envelope

    a_{n+1}  <=  (prod_{k<=n} chi_k) a_0 + fbar_n - sbar_n,

where the accumulated terms obey ``fbar_n = chi_n fbar_{n-1} + f_n`` (same
for ``sbar``), which is how they are evaluated; the double-sum closed form is
kept for testing only.

Two layers sit on top:

* :func:`single_sequence_bound` bounds the mean squared distance of a relaxed
  perturbed sequence to its target, from per-step contraction coefficients
  ``mu_n``, perturbation budgets ``xi_n``, and relaxations ``lam_n``.
* :func:`block_coordinate_bound` specializes to random block sweeping.  For a
  family with blockwise coefficients ``tau_{i,n}``, marginal activation
  probabilities ``p_i``, and weights ``w_i`` normalized by
  ``max_i w_i p_i = 1``, the effective inputs are

      xi_n = alpha_n * max_i w_i,
      mu_n = 1 - min_i (p_i - tau_{i,n} / w_i),

  and the resulting envelope dominates the weighted mean squared error
  ``sum_i w_i E ||x_{i,n} - xbar_i||^2`` at every iterate.

:func:`plain_norm_bound` transports the inverse-marginal weighted envelope to
the plain norm, at the price of the factor ``max p / min p`` on the initial
term.  The rate helpers at the bottom quantify the cost-adjusted linear rate
of the error-free regime.
"""

from __future__ import annotations

import warnings
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .blockspace import WeightVector
from .errors import CertificationError
from .schedules import Schedules

__all__ = [
    "BoundTrajectory",
    "envelope_recursion",
    "single_sequence_bound",
    "block_coordinate_bound",
    "plain_norm_bound",
    "normalized_rate",
    "normalized_rate_ratio_bounds",
    "optimal_single_block_probs",
]


def _seq(x, name: str, length: int | None = None) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D sequence")
    if length is not None:
        if arr.size < length:
            raise ValueError(f"{name} has length {arr.size}, need at least {length}")
        arr = arr[:length]
    if np.any(arr < 0):
        raise ValueError(f"{name} must be nonnegative")
    return arr


def _accumulate(factors: np.ndarray, terms: np.ndarray) -> np.ndarray:
    out = np.empty_like(terms)
    running = 0.0
    for k in range(terms.size):
        running = factors[k] * running + terms[k]
        out[k] = running
    return out


def envelope_recursion(initial: float,
                       factors: Sequence[float],
                       forcing: Sequence[float] | None = None,
                       slack: Sequence[float] | None = None,
                       steps: int | None = None) -> np.ndarray:
    """Unroll the one-step affine recursion into its bound envelope.

    Returns an array of length ``steps + 1`` whose entry ``n`` bounds the
    quantity after ``n`` steps: entry 0 is ``initial`` and

        out[n + 1] = (prod_{k <= n} factors[k]) * initial
                     + fbar_n - sbar_n,

    with the accumulated forcing and slack computed by the stable running
    recursion.  All inputs must be nonnegative.
    """
    if initial < 0:
        raise ValueError("initial value must be nonnegative")
    chi = _seq(factors, "factors", steps)
    n = chi.size if steps is None else steps
    chi = chi[:n]
    eta = np.zeros(n) if forcing is None else _seq(forcing, "forcing", n)
    theta = np.zeros(n) if slack is None else _seq(slack, "slack", n)

    out = np.empty(n + 1)
    out[0] = initial
    head = float(initial)
    fbar = 0.0
    sbar = 0.0
    for k in range(n):
        head *= chi[k]
        fbar = chi[k] * fbar + eta[k]
        sbar = chi[k] * sbar + theta[k]
        out[k + 1] = head + fbar - sbar
    return out


@dataclass(frozen=True)
class BoundTrajectory:
    """Envelope of a mean squared error together with its decomposition.

    ``bound[n]`` dominates the (weighted) mean squared error at iterate ``n``;
    ``chi[k]``, ``eta_bar[k]`` and ``vartheta_bar[k]`` describe step ``k``
    (the step producing iterate ``k + 1``), so

        bound[n] = prefactor * (prod_{k<n} chi[k]) * bound0 + eta_bar[n-1]
                   - vartheta_bar[n-1].

    ``weights`` records the weighted norm the bound lives in (None means the
    plain norm).  ``transient`` is the first step index from which every
    ``chi`` stays below one.
    """

    bound: np.ndarray
    chi: np.ndarray
    eta_bar: np.ndarray
    vartheta_bar: np.ndarray
    mu: np.ndarray
    xi: np.ndarray
    prefactor: float = 1.0
    weights: np.ndarray | None = None
    transient: int = 0

    @property
    def horizon(self) -> int:
        return self.chi.size

    def __post_init__(self):
        for name in ("bound", "chi", "eta_bar", "vartheta_bar", "mu", "xi"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=np.float64).copy()
            w.flags.writeable = False
            object.__setattr__(self, "weights", w)
        if self.bound.size != self.chi.size + 1:
            raise ValueError("bound must have one more entry than the step arrays")


def _chi_below_one_from(chi: np.ndarray) -> int:
    above = np.flatnonzero(chi >= 1.0)
    return 0 if above.size == 0 else int(above[-1]) + 1


def single_sequence_bound(initial: float,
                          lam: Sequence[float],
                          mu: Sequence[float],
                          xi: Sequence[float],
                          nu: Sequence[float] | None = None,
                          theta_aux: Sequence[float] | None = None,
                          *,
                          xi_sqrt_summable: bool | None = None,
                          transient: int = 0,
                          prefactor: float = 1.0,
                          weights: np.ndarray | None = None) -> BoundTrajectory:
    """Mean-square envelope for one relaxed, perturbed sequence.

    Per step the inputs are the relaxation ``lam_n`` in (0, 1], the
    contraction coefficient ``mu_n`` of the unperturbed map, the perturbation
    second-moment budget ``xi_n``, and optional extra forcing ``nu_n`` and
    slack ``theta_aux_n``.  The step factor is

        chi_n = 1 - lam_n + lam_n mu_n
                + sqrt(xi_n) lam_n (1 - lam_n + lam_n sqrt(mu_n))

    and the forcing accumulated into the envelope is

        eta_n = lam_n (nu_n
                + (1 - lam_n + lam_n (2 sqrt(nu_n) + sqrt(mu_n))) sqrt(xi_n)
                + lam_n xi_n).

    The slack side keeps only its known part ``lam_n * theta_aux_n``; its
    process-dependent remainder is nonnegative, so dropping it can only
    loosen the envelope, never invalidate it.

    Admissibility is certified before anything is computed, and violations
    raise :class:`CertificationError` naming the hypothesis:

    [a] relaxations lie in (0, 1] with a positive lower bound;
    [b] the budgets ``xi`` have summable square roots (callers pass the
        closed-form certificate via ``xi_sqrt_summable``; identically zero
        budgets self-certify);
    [c] ``mu_n < 1`` for every step at or beyond ``transient``.

    Together with [b] forcing ``xi`` to vanish, [a] and [c] pin the eventual
    step factor ``1 - min(lam) (1 - max tail mu)`` strictly below one, which
    is what makes the envelope a linear-rate certificate.
    """
    mu_arr = _seq(mu, "mu")
    n = mu_arr.size
    lam_arr = _seq(lam, "lam", n)
    xi_arr = _seq(xi, "xi", n)
    nu_arr = np.zeros(n) if nu is None else _seq(nu, "nu", n)
    theta_arr = np.zeros(n) if theta_aux is None else _seq(theta_aux, "theta_aux", n)

    if np.any(lam_arr <= 0) or np.any(lam_arr > 1):
        raise CertificationError(
            "hypothesis [a] violated: relaxations must lie in (0, 1]"
        )
    if not np.all(xi_arr == 0.0):
        if xi_sqrt_summable is None:
            raise CertificationError(
                "hypothesis [b] not certified: pass xi_sqrt_summable for "
                "nonzero perturbation budgets"
            )
        if not xi_sqrt_summable:
            raise CertificationError(
                "hypothesis [b] violated: perturbation budgets must have "
                "summable square roots"
            )
    if not 0 <= transient <= n:
        raise ValueError("transient must index into the horizon")
    if transient < n and np.any(mu_arr[transient:] >= 1.0):
        bad = transient + int(np.flatnonzero(mu_arr[transient:] >= 1.0)[0])
        raise CertificationError(
            f"hypothesis [c] violated: mu={mu_arr[bad]!r} at step {bad} "
            f"is not below one (allowed transient {transient})"
        )

    sq_mu = np.sqrt(mu_arr)
    sq_xi = np.sqrt(xi_arr)
    sq_nu = np.sqrt(nu_arr)
    chi = 1.0 - lam_arr + lam_arr * mu_arr + sq_xi * lam_arr * (1.0 - lam_arr + lam_arr * sq_mu)
    eta = lam_arr * (
        nu_arr
        + (1.0 - lam_arr + lam_arr * (2.0 * sq_nu + sq_mu)) * sq_xi
        + lam_arr * xi_arr
    )
    vartheta = lam_arr * theta_arr

    # the bounded quantity is a squared norm, so clipping at zero is always valid
    bound = np.maximum(envelope_recursion(prefactor * float(initial), chi, eta, vartheta), 0.0)
    return BoundTrajectory(
        bound=bound,
        chi=chi,
        eta_bar=_accumulate(chi, eta),
        vartheta_bar=_accumulate(chi, vartheta),
        mu=mu_arr,
        xi=xi_arr,
        prefactor=float(prefactor),
        weights=weights,
        transient=_chi_below_one_from(chi),
    )


def _tau_table(tau, steps: int, m: int) -> np.ndarray:
    arr = np.asarray(tau, dtype=np.float64)
    if arr.ndim == 1:
        arr = np.broadcast_to(arr, (steps, arr.size))
    if arr.shape != (steps, m):
        raise ValueError(f"tau table must have shape ({steps}, {m}), got {arr.shape}")
    if np.any(arr < 0):
        raise ValueError("contraction coefficients must be nonnegative")
    return arr


def block_coordinate_bound(tau,
                           marginals: Sequence[float],
                           weights: WeightVector | Sequence[float],
                           schedules: Schedules,
                           initial_weighted_sq: float,
                           *,
                           transient: int = 0) -> BoundTrajectory:
    """Weighted mean-square envelope under random block sweeping.

    ``tau`` is the per-step table of blockwise contraction coefficients (one
    row per step, or a single row for stationary families), ``marginals`` the
    exact activation probabilities, and ``weights`` the norm weights, which
    must satisfy the normalization ``max_i w_i p_i = 1`` (checked to 1e-12)
    together with ``tau_{i,n} < w_i p_i`` for every block at or beyond the
    transient.  ``initial_weighted_sq`` is the weighted squared distance of
    the initial point (its expectation, for a random initial point).
    """
    p = np.asarray(marginals, dtype=np.float64).reshape(-1)
    if np.any(p <= 0) or np.any(p > 1):
        raise CertificationError(
            "hypothesis [d] violated: marginal activation probabilities "
            "must lie in (0, 1]"
        )
    omega = weights.omega if isinstance(weights, WeightVector) else WeightVector(weights).omega
    if omega.size != p.size:
        raise CertificationError(f"{omega.size} weights for {p.size} marginals")
    wp = omega * p
    if abs(wp.max() - 1.0) > 1e-12:
        raise CertificationError(
            f"weight normalization violated: max_i w_i p_i = {wp.max()!r}, expected 1"
        )

    steps = schedules.horizon
    schedules.validate()
    tau_arr = _tau_table(tau, steps, p.size)
    look = tau_arr[transient:] if transient < steps else tau_arr[:0]
    if look.size:
        worst = look.max(axis=0)
        bad = np.flatnonzero(worst >= wp)
        if bad.size:
            i = int(bad[0])
            raise CertificationError(
                f"block {i} has contraction coefficient {worst[i]!r} "
                f"not below w_i p_i = {wp[i]!r}"
            )

    alpha = schedules.error_budgets()
    xi = alpha * omega.max()
    mu = 1.0 - np.min(p[None, :] - tau_arr / omega[None, :], axis=1)
    if initial_weighted_sq < 0:
        raise ValueError("initial weighted squared distance must be nonnegative")
    return single_sequence_bound(
        float(initial_weighted_sq),
        schedules.relaxations(),
        mu,
        xi,
        xi_sqrt_summable=schedules.error_budget.sqrt_summable(),
        transient=transient,
        weights=omega,
    )


def plain_norm_bound(tau,
                     marginals: Sequence[float],
                     schedules: Schedules,
                     initial_sq: float,
                     *,
                     transient: int = 0) -> BoundTrajectory:
    """Plain-norm mean-square envelope under random block sweeping.

    Uses the inverse-marginal weights internally, where the effective inputs
    reduce to ``xi_n = alpha_n / min p`` and
    ``mu_n = 1 - min_i p_i (1 - tau_{i,n})``, and transports the result back
    to the plain norm: the initial term picks up the equivalence factor
    ``max p / min p`` while the accumulated forcing carries over unchanged.
    """
    p = np.asarray(marginals, dtype=np.float64).reshape(-1)
    if np.any(p <= 0) or np.any(p > 1):
        raise CertificationError(
            "hypothesis [d] violated: marginal activation probabilities "
            "must lie in (0, 1]"
        )
    if initial_sq < 0:
        raise ValueError("initial squared distance must be nonnegative")
    prefactor = float(p.max() / p.min())

    steps = schedules.horizon
    schedules.validate()
    tau_arr = _tau_table(tau, steps, p.size)
    look = tau_arr[transient:] if transient < steps else tau_arr[:0]
    if look.size:
        worst = look.max(axis=0)
        bad = np.flatnonzero(worst >= 1.0)
        if bad.size:
            i = int(bad[0])
            raise CertificationError(
                f"block {i} has contraction coefficient {worst[i]!r} not below one"
            )

    alpha = schedules.error_budgets()
    xi = alpha / p.min()
    mu = 1.0 - np.min(p[None, :] * (1.0 - tau_arr), axis=1)
    return single_sequence_bound(
        float(initial_sq),
        schedules.relaxations(),
        mu,
        xi,
        xi_sqrt_summable=schedules.error_budget.sqrt_summable(),
        transient=transient,
        prefactor=prefactor,
        weights=None,
    )


def normalized_rate(activation: float, chi: float) -> float:
    """Linear rate per unit of computation at activation probability ``p``.

    With a constant step factor ``chi`` the envelope after n steps is
    ``chi_p^n`` with ``chi_p = 1 - (1 - chi) p``, while each step costs a
    ``p`` fraction of a full sweep.  The cost-normalized exponent is

        rate(p) = -log(1 - (1 - chi) p) / p,

    evaluated through log1p for stability near small ``p`` and extended by
    continuity to ``1 - chi`` at ``p = 0``.
    """
    if not 0.0 <= activation <= 1.0:
        raise ValueError("activation probability must lie in [0, 1]")
    if not 0.0 <= chi < 1.0:
        raise ValueError("step factor must lie in [0, 1)")
    if activation == 0.0:
        return 1.0 - chi
    q = (1.0 - chi) * activation
    if q >= 1.0:
        raise ValueError("degenerate combination: (1 - chi) * p must stay below 1")
    return float(-np.log1p(-q) / activation)


def normalized_rate_ratio_bounds(chi: float) -> tuple[float, float]:
    """Range of ``rate(p) / rate(1)`` over all activation probabilities.

    For ``chi`` in (0, 1) the ratio always lies in
    ``[-(1 - chi)/log(chi), 1]``; at ``chi = 0`` the lower endpoint is taken
    as 0 by its limit.  The upper endpoint 1 is attained at ``p = 1``.
    """
    if not 0.0 <= chi < 1.0:
        raise ValueError("step factor must lie in [0, 1)")
    if chi == 0.0:
        warnings.warn("step factor 0: lower ratio bound taken as its limit 0",
                      stacklevel=2)
        return 0.0, 1.0
    return float(-(1.0 - chi) / np.log(chi)), 1.0


def optimal_single_block_probs(tau: Sequence[float]) -> np.ndarray:
    """Selection probabilities minimizing the step factor under one-block sweeping.

    When exactly one block is activated per iteration and the coefficients
    are stationary, choosing ``p_i`` proportional to ``1/(1 - tau_i)``
    equalizes all products ``p_i (1 - tau_i)``, which maximizes their minimum
    over the probability simplex and hence minimizes the resulting step
    factor ``1 - lam * min_i p_i (1 - tau_i)``.
    """
    t = np.asarray(tau, dtype=np.float64).reshape(-1)
    if t.size == 0:
        raise ValueError("need at least one coefficient")
    if np.any(t < 0) or np.any(t >= 1):
        raise ValueError("coefficients must lie in [0, 1)")
    inv = 1.0 / (1.0 - t)
    return inv / inv.sum()
