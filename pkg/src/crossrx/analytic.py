"""Reception probability and throughput for the tagged link.

The pipeline, for a receiver on the H road: condition on the tagged
transmitter being active, write the SINR success event through the
fading CCDF, and reduce everything to the Laplace transforms of the two
roads' interference evaluated (and differentiated) at zeta = beta~ /
theta_0. Closed forms exist for the line-of-sight roads and for the
street-canyon (Manhattan-loss) V road; an adaptive-quadrature transform
covers every remaining configuration and doubles as the oracle the
closed forms are tested against.

Derivative conventions used throughout (S_0 the useful fading, I_R the
road-R interference, m = i - j):

    C(j)    = sum_n binom(j,n) N~^(j-n) (-1)^n L_H^(n)(zeta)
            = E[(N~ + I_H)^j exp(-zeta I_H)]
    D(i,j)  = (-1)^m L_V^(m)(zeta) = E[I_V^m exp(-zeta I_V)]
    P       = exp(-zeta N~) sum_i sum_j binom(i,j) zeta^i / i! C(j) D(i,j)

All reception functions return values in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .mac import (OffRoadPosition, access_probability, aloha_intensity,
                  csma_intensity)
from .model import (EUCLIDEAN, MANHATTAN, Aloha, Csma, Erlang, LinkSpec,
                    NoMac, Position, Scenario)
from .numerics import (NonConvergence, OrderTooHigh, QuadratureSettings,
                       derivative_n, gamma_fn, hyp2f1_regularized,
                       integrate_line, pochhammer)
from .propagation import UnsupportedDistribution, fading_lt, path_loss


class WrongScenario(TypeError):
    """Scenario does not satisfy the preconditions of this closed form."""


@dataclass(frozen=True)
class EvalContext:
    """The four recurring scalars of the reception pipeline.

    tilde_beta = beta / l(tx, rx) is the threshold renormalized by the
    useful link's path gain; tilde_n = N / P; zeta = tilde_beta / theta_0
    (defined when the useful fading is Erlang); kappa is the coefficient
    in L_H(s) = exp(-kappa s^(1/alpha)) (defined for Aloha with Erlang
    interferer fading on H).
    """

    tilde_beta: float
    tilde_n: float
    zeta: Optional[float] = None
    kappa: Optional[float] = None


@dataclass(frozen=True)
class InterferenceLT:
    """Laplace transform of one road's interference at the receiver.

    ``provenance`` records whether values come from a closed form or from
    quadrature; ``derivative`` routes to the best available evaluation:
    an exact formula when one is attached, Richardson differencing
    otherwise.
    """

    fn: Callable[[float], float]
    road: str
    provenance: str  # "closed-form" | "quadrature"
    d1: Optional[Callable[[float], float]] = None
    dn: Optional[Callable[[float, int], float]] = None

    def __call__(self, s: float) -> float:
        return self.fn(s)

    def derivative(self, s: float, n: int) -> float:
        if n == 0:
            return self.fn(s)
        if self.dn is not None:
            return self.dn(s, n)
        if n == 1 and self.d1 is not None:
            return self.d1(s)
        return derivative_n(self.fn, s, n)


def _is_exponential(f) -> bool:
    return isinstance(f, Erlang) and f.k == 1


def _require(cond: bool, what: str) -> None:
    if not cond:
        raise WrongScenario(what)


def _h_coefficient(p: float, lam: float, amplitude: float, alpha: float,
                   k: int, theta: float) -> float:
    """Coefficient K of L_H(s) = exp(-K s^(1/alpha)) for an on-road rx.

    Comes from the binomial expansion of 1 - (1 + b r^-alpha)^-k
    integrated over the road; for k = 1 it collapses to the familiar
    2 p lam (A theta)^(1/alpha) (pi/alpha) csc(pi/alpha).
    """

    total = 0.0
    for q in range(k):
        total += (math.comb(k, q) * gamma_fn(q + 1.0 / alpha)
                  * gamma_fn(k - q - 1.0 / alpha))
    total /= gamma_fn(float(k)) * alpha
    return 2.0 * p * lam * (amplitude * theta) ** (1.0 / alpha) * total


def eval_context(scenario: Scenario, link: LinkSpec) -> EvalContext:
    l_useful = path_loss(scenario.loss_useful, link.tx, link.rx)
    tilde_beta = link.beta / l_useful
    tilde_n = link.noise_w / link.power_w
    zeta = None
    if isinstance(scenario.fading_useful, Erlang):
        zeta = tilde_beta / scenario.fading_useful.theta
    kappa = None
    if isinstance(scenario.mac, Aloha) and isinstance(scenario.fading_h, Erlang):
        kappa = _h_coefficient(scenario.mac.p, scenario.roads.lambda_h,
                               scenario.loss_h.amplitude_a, scenario.loss_h.alpha,
                               scenario.fading_h.k, scenario.fading_h.theta)
    return EvalContext(tilde_beta=tilde_beta, tilde_n=tilde_n,
                       zeta=zeta, kappa=kappa)


def lt_h_sqrt_derivative(kappa: float, zeta: float, n: int) -> float:
    """Exact n-th derivative of zeta -> exp(-kappa sqrt(zeta)), any n >= 0.

    Closed Pochhammer double sum; valid only for the alpha = 2 square-root
    form. Also the reference the numeric differentiator is checked
    against.
    """

    if n < 0 or n != int(n):
        raise ValueError(f"derivative order must be an integer >= 0, got {n}")
    root = math.sqrt(zeta)
    base = math.exp(-kappa * root)
    if n == 0:
        return base
    total = 0.0
    for l in range(n + 1):
        for m in range(l + 1):
            total += ((-1.0) ** m * (-kappa * root) ** l
                      * pochhammer((2.0 - m + l - 2.0 * n) / 2.0, n)
                      / (math.factorial(m) * math.factorial(l - m)))
    return base * zeta ** (-n) * total


def _urban_v_parts(p: float, lam: float, amplitude: float, alpha: float,
                   k: int, theta: float, d: float):
    """G(s) = -ln L_V(s) and G'(s) for the street-canyon V road.

    Splitting the Erlang tail binomially and integrating each
    (t^alpha + b)^-k piece over the road beyond the corner gives, with
    b = A s theta and per binomial index q:

        G(s) = 2 p lam sum_q binom(k,q) Gamma(q+1/alpha)/alpha *
               [ b^(1/alpha) Gamma(k-q-1/alpha)/Gamma(k)
                 - d^(alpha q + 1) b^-q 2F1reg(k, q+1/alpha; 1+q+1/alpha; -d^alpha/b) ]

    The finite part subtracted through the regularized hypergeometric is
    the [0, d) stretch of road the corner geometry removes; at d = 0 the
    whole expression reduces to the H-road coefficient.
    """

    coeff = 2.0 * p * lam
    gk = gamma_fn(float(k))
    q_terms = []
    for q in range(k):
        c_q = math.comb(k, q) * gamma_fn(q + 1.0 / alpha) / alpha
        g1_q = gamma_fn(k - q - 1.0 / alpha) / gk
        q_terms.append((q, c_q, g1_q))
    b_prime = amplitude * theta

    def neglog(s: float) -> float:
        if s == 0.0:
            return 0.0
        b = amplitude * s * theta
        total = 0.0
        for q, c_q, g1_q in q_terms:
            head = b ** (1.0 / alpha) * g1_q
            tail = 0.0
            if d > 0.0:
                w = -(d ** alpha) / b
                f_q = hyp2f1_regularized(float(k), q + 1.0 / alpha,
                                         1.0 + q + 1.0 / alpha, w)
                tail = d ** (alpha * q + 1.0) * b ** (-float(q)) * f_q
            total += c_q * (head - tail)
        return coeff * total

    def neglog_prime(s: float) -> float:
        b = amplitude * s * theta
        total = 0.0
        for q, c_q, g1_q in q_terms:
            head = g1_q * b_prime * b ** (1.0 / alpha - 1.0) / alpha
            tail = 0.0
            if d > 0.0:
                w = -(d ** alpha) / b
                a1, b1, c1 = float(k), q + 1.0 / alpha, 1.0 + q + 1.0 / alpha
                f_q = hyp2f1_regularized(a1, b1, c1, w)
                fp_q = a1 * b1 * hyp2f1_regularized(a1 + 1.0, b1 + 1.0,
                                                    c1 + 1.0, w)
                w_prime = (d ** alpha) * b_prime / (b * b)
                tail = d ** (alpha * q + 1.0) * (
                    -q * b ** (-float(q) - 1.0) * b_prime * f_q
                    + b ** (-float(q)) * fp_q * w_prime
                )
            total += c_q * (head - tail)
        return coeff * total

    return neglog, neglog_prime


# --- closed-form Laplace transforms -----------------------------------------

def lt_interference_generic(road: str, scenario: Scenario, link: LinkSpec,
                            s: float,
                            settings: QuadratureSettings | None = None) -> float:
    """L_{I_R}(s) by direct quadrature of the intensity-weighted exponent.

    exp(-integral of lambda_mac(z) (1 - L_S(s l(z, rx))) dz) over the
    road. Universal fallback: every closed form in this module is tested
    against it. Breakpoints mark the kinks the MAC geometry introduces so
    the adaptive subdivision starts from the right segments.
    """

    if s == 0.0:
        return 1.0
    if s < 0:
        raise ValueError(f"LT argument must be >= 0, got {s}")
    mac = scenario.mac
    if isinstance(mac, NoMac):
        return 1.0
    fading = scenario.fading_h if road == "h" else scenario.fading_v
    loss = scenario.loss_h if road == "h" else scenario.loss_v
    lt_s = fading_lt(fading)
    rx = link.rx

    cuts: list[float] = []
    if isinstance(mac, Aloha):
        if mac.p == 0.0:
            return 1.0
        intensity = aloha_intensity(road, scenario, link.tx)
    elif isinstance(mac, Csma):
        intensity = csma_intensity(road, scenario, link.tx)
        delta = mac.delta
        cuts.extend((-delta, delta))  # cross-road coupling edges
        if road == "h":
            gap = delta * delta - link.tx.y ** 2
            if gap >= 0.0:
                half = math.sqrt(gap)
                cuts.extend((link.tx.x - half, link.tx.x + half))
        else:
            gap = delta * delta - link.tx.x ** 2
            if gap >= 0.0:
                half = math.sqrt(gap)
                cuts.extend((link.tx.y - half, link.tx.y + half))
    else:
        raise WrongScenario(f"no interferer intensity defined for {mac!r}")

    if road == "h":
        cuts.append(rx.x)  # distance kink at the receiver

        def dist(z: float) -> float:
            return abs(z - rx.x)
    else:
        cuts.append(0.0)
        if loss.norm == EUCLIDEAN:
            def dist(z: float) -> float:
                return math.hypot(rx.x, z)
        else:
            def dist(z: float) -> float:
                return abs(rx.x) + abs(z)

    a_amp, alpha = loss.amplitude_a, loss.alpha

    def integrand(z: float) -> float:
        lam = intensity(z)
        if lam == 0.0:
            return 0.0
        r = dist(z)
        if r == 0.0:
            return lam  # s*l -> inf, L_S -> 0
        return lam * (1.0 - lt_s(s * a_amp * r ** (-alpha)))

    value, _err = integrate_line(integrand, "full", breakpoints=cuts,
                                 settings=settings)
    return math.exp(-value)


def lt_rural_h(scenario: Scenario, link: LinkSpec, s: float) -> float:
    """Closed-form L_{I_H}(s): Aloha, exponential fading, line of sight."""

    _require(isinstance(scenario.mac, Aloha), "lt_rural_h needs Aloha")
    _require(_is_exponential(scenario.fading_h),
             "lt_rural_h needs exponential fading on the H road")
    _require(scenario.loss_h.norm == EUCLIDEAN,
             "lt_rural_h needs Euclidean loss on the H road")
    if s == 0.0:
        return 1.0
    p = scenario.mac.p
    lam = scenario.roads.lambda_h
    a_amp, alpha = scenario.loss_h.amplitude_a, scenario.loss_h.alpha
    theta = scenario.fading_h.theta
    if alpha == 2.0:
        return math.exp(-p * lam * math.pi * math.sqrt(a_amp * theta * s))
    kappa = _h_coefficient(p, lam, a_amp, alpha, 1, theta)
    return math.exp(-kappa * s ** (1.0 / alpha))


def lt_rural_v(scenario: Scenario, link: LinkSpec, s: float) -> float:
    """Closed-form L_{I_V}(s): Aloha, exponential fading, line of sight,

    alpha = 2 (other exponents fall back to quadrature). The road is at
    planar distance d = |rx.x| from the receiver.
    """

    _require(isinstance(scenario.mac, Aloha), "lt_rural_v needs Aloha")
    _require(_is_exponential(scenario.fading_v),
             "lt_rural_v needs exponential fading on the V road")
    _require(scenario.loss_v.norm == EUCLIDEAN,
             "lt_rural_v needs Euclidean loss on the V road")
    if s == 0.0:
        return 1.0
    if scenario.loss_v.alpha != 2.0:
        return lt_interference_generic("v", scenario, link, s)
    p = scenario.mac.p
    lam = scenario.roads.lambda_v
    b = scenario.loss_v.amplitude_a * scenario.fading_v.theta * s
    d = abs(link.rx.x)
    return math.exp(-p * lam * math.pi * b / math.sqrt(b + d * d))


def lt_urban_v(scenario: Scenario, link: LinkSpec, s: float) -> float:
    """Closed-form L_{I_V}(s): Aloha, Erlang fading, street-canyon loss."""

    _require(isinstance(scenario.mac, Aloha), "lt_urban_v needs Aloha")
    _require(isinstance(scenario.fading_v, Erlang),
             "lt_urban_v needs Erlang fading on the V road")
    _require(scenario.loss_v.norm == MANHATTAN,
             "lt_urban_v needs Manhattan loss on the V road")
    if s == 0.0:
        return 1.0
    neglog, _ = _urban_v_parts(scenario.mac.p, scenario.roads.lambda_v,
                               scenario.loss_v.amplitude_a,
                               scenario.loss_v.alpha,
                               scenario.fading_v.k, scenario.fading_v.theta,
                               abs(link.rx.x))
    return math.exp(-neglog(s))


def _unit_lt(road: str) -> InterferenceLT:
    return InterferenceLT(fn=lambda s: 1.0, road=road, provenance="closed-form",
                          dn=lambda s, n: 1.0 if n == 0 else 0.0)


def _road_lt(road: str, scenario: Scenario, link: LinkSpec) -> InterferenceLT:
    """Best available LT for one road: closed form if the scenario admits

    one, quadrature otherwise."""

    mac = scenario.mac
    if isinstance(mac, NoMac) or (isinstance(mac, Aloha) and mac.p == 0.0):
        return _unit_lt(road)

    fading = scenario.fading_h if road == "h" else scenario.fading_v
    loss = scenario.loss_h if road == "h" else scenario.loss_v
    lam = scenario.roads.density(road)

    if isinstance(mac, Aloha) and isinstance(fading, Erlang):
        p = mac.p
        if road == "h":
            # Interferers and receiver share the road, so both norms give
            # the same 1-D distance and one closed form covers them.
            kappa = _h_coefficient(p, lam, loss.amplitude_a, loss.alpha,
                                   fading.k, fading.theta)
            inv_alpha = 1.0 / loss.alpha

            def fn(s: float, _k: float = kappa) -> float:
                return math.exp(-_k * s ** inv_alpha)

            def d1(s: float, _k: float = kappa) -> float:
                return -_k * inv_alpha * s ** (inv_alpha - 1.0) * fn(s)

            dn = None
            if loss.alpha == 2.0:
                def dn(s: float, n: int, _k: float = kappa) -> float:
                    return lt_h_sqrt_derivative(_k, s, n)

            return InterferenceLT(fn=fn, road=road, provenance="closed-form",
                                  d1=d1, dn=dn)

        d = abs(link.rx.x)
        if loss.norm == MANHATTAN:
            neglog, neglog_prime = _urban_v_parts(p, lam, loss.amplitude_a,
                                                  loss.alpha, fading.k,
                                                  fading.theta, d)

            def fn(s: float) -> float:
                return math.exp(-neglog(s))

            def d1(s: float) -> float:
                return -neglog_prime(s) * fn(s)

            return InterferenceLT(fn=fn, road=road, provenance="closed-form",
                                  d1=d1)

        if fading.k == 1 and loss.alpha == 2.0:
            scale = loss.amplitude_a * fading.theta
            base = p * lam * math.pi

            def fn(s: float) -> float:
                b = scale * s
                return math.exp(-base * b / math.sqrt(b + d * d))

            def d1(s: float) -> float:
                b = scale * s
                c_prime = scale * (0.5 * b + d * d) / (b + d * d) ** 1.5
                return -base * c_prime * fn(s)

            return InterferenceLT(fn=fn, road=road, provenance="closed-form",
                                  d1=d1)

    # Everything else: quadrature over the MAC intensity.
    def fn(s: float) -> float:
        return lt_interference_generic(road, scenario, link, s)

    return InterferenceLT(fn=fn, road=road, provenance="quadrature")


# --- reception probability ---------------------------------------------------

def reception_rural(scenario: Scenario, link: LinkSpec) -> float:
    """Aloha + line-of-sight + exponential fading on every link, alpha = 2.

    Three-factor product: noise, H-road interference, V-road
    interference. Valid for any transmitter position; only the link
    distance and the receiver's offset from the intersection enter.
    """

    _require(isinstance(scenario.mac, Aloha), "reception_rural needs Aloha")
    for tag, f in (("useful", scenario.fading_useful),
                   ("h", scenario.fading_h), ("v", scenario.fading_v)):
        _require(_is_exponential(f),
                 f"reception_rural needs exponential fading ({tag} link)")
    for tag, sp in (("useful", scenario.loss_useful),
                    ("h", scenario.loss_h), ("v", scenario.loss_v)):
        _require(sp.norm == EUCLIDEAN and sp.alpha == 2.0,
                 f"reception_rural needs Euclidean alpha=2 loss ({tag})")
    ctx = eval_context(scenario, link)
    s_star = ctx.zeta  # tilde_beta / theta_0
    return (math.exp(-ctx.tilde_n * s_star)
            * lt_rural_h(scenario, link, s_star)
            * lt_rural_v(scenario, link, s_star))


def reception_csma(scenario: Scenario, link: LinkSpec) -> float:
    """CSMA reception probability, conditioned on the tagged tx holding

    the channel: noise factor times the two quadrature LTs under the
    hard-core-thinned intensity."""

    _require(isinstance(scenario.mac, Csma), "reception_csma needs CSMA")
    _require(_is_exponential(scenario.fading_useful),
             "reception_csma needs an exponential useful link; use "
             "reception_generic for Erlang shapes above 1")
    ctx = eval_context(scenario, link)
    s_star = ctx.zeta
    return (math.exp(-ctx.tilde_n * s_star)
            * lt_interference_generic("h", scenario, link, s_star)
            * lt_interference_generic("v", scenario, link, s_star))


def _erlang_reception_sum(zeta: float, tilde_n: float, k0: int,
                          lh_deriv: Callable[[int], float],
                          lv_deriv: Callable[[int], float]) -> float:
    # See module docstring for the C(j)/D(i,j) conventions. All terms are
    # nonnegative (they are expectations of nonnegative quantities), so
    # the double sum is numerically benign.
    dh = [lh_deriv(n) for n in range(k0)]
    dv = [lv_deriv(n) for n in range(k0)]
    total = 0.0
    for i in range(k0):
        weight = zeta ** i / math.factorial(i)
        for j in range(i + 1):
            c_j = 0.0
            for n in range(j + 1):
                c_j += (math.comb(j, n) * tilde_n ** (j - n)
                        * (-1.0) ** n * dh[n])
            d_ij = (-1.0) ** (i - j) * dv[i - j]
            total += math.comb(i, j) * weight * c_j * d_ij
    value = math.exp(-zeta * tilde_n) * total
    return min(1.0, max(0.0, value))


def reception_urban(scenario: Scenario, link: LinkSpec) -> float:
    """Aloha reception with street-canyon propagation on the useful and

    V links (Manhattan loss, Erlang fading) and line-of-sight exponential
    interference from the receiver's own road.

    The Erlang CCDF turns the success event into derivatives of the two
    LTs at zeta, giving the C/D double sum. H-road derivatives use the
    exact square-root chain when alpha_h = 2 and numeric differencing
    otherwise; V-road first derivatives are analytic, higher ones
    numeric.
    """

    _require(isinstance(scenario.mac, Aloha), "reception_urban needs Aloha")
    _require(isinstance(scenario.fading_useful, Erlang),
             "reception_urban needs Erlang useful fading (fit LogNormal first)")
    _require(scenario.loss_useful.norm == MANHATTAN,
             "reception_urban needs Manhattan loss on the useful link")
    _require(isinstance(scenario.fading_v, Erlang),
             "reception_urban needs Erlang fading on the V road")
    _require(scenario.loss_v.norm == MANHATTAN,
             "reception_urban needs Manhattan loss on the V road")
    _require(_is_exponential(scenario.fading_h),
             "reception_urban needs exponential fading on the H road")
    _require(scenario.loss_h.norm == EUCLIDEAN,
             "reception_urban needs Euclidean loss on the H road")

    ctx = eval_context(scenario, link)
    zeta = ctx.zeta
    k0 = scenario.fading_useful.k
    kappa = ctx.kappa
    alpha_h = scenario.loss_h.alpha

    if alpha_h == 2.0:
        def lh_deriv(n: int) -> float:
            return lt_h_sqrt_derivative(kappa, zeta, n)
    else:
        inv_alpha = 1.0 / alpha_h

        def lh_fn(s: float) -> float:
            return math.exp(-kappa * s ** inv_alpha)

        def lh_deriv(n: int) -> float:
            return lh_fn(zeta) if n == 0 else derivative_n(lh_fn, zeta, n)

    neglog, neglog_prime = _urban_v_parts(
        scenario.mac.p, scenario.roads.lambda_v, scenario.loss_v.amplitude_a,
        scenario.loss_v.alpha, scenario.fading_v.k, scenario.fading_v.theta,
        abs(link.rx.x))

    def lv_fn(s: float) -> float:
        return math.exp(-neglog(s))

    def lv_deriv(n: int) -> float:
        if n == 0:
            return lv_fn(zeta)
        if n == 1:
            return -neglog_prime(zeta) * lv_fn(zeta)
        return derivative_n(lv_fn, zeta, n)

    return _erlang_reception_sum(zeta, ctx.tilde_n, k0, lh_deriv, lv_deriv)


def reception_generic(scenario: Scenario, link: LinkSpec) -> float:
    """Reception probability for any scenario with an Erlang useful link.

    Routes each road to its best LT (closed form where available,
    quadrature otherwise) and evaluates the same C/D sum as
    reception_urban, which it must reproduce on street-canyon scenarios.
    """

    f_u = scenario.fading_useful
    if not isinstance(f_u, Erlang):
        raise UnsupportedDistribution(
            f"reception needs an Erlang useful link, got {f_u!r}; "
            "approximate with erlang_fit first")
    k0 = f_u.k
    if k0 - 1 > 4:
        raise OrderTooHigh(
            f"Erlang shape k0={k0} needs LT derivatives of order {k0 - 1}; "
            "orders above 4 are rejected (see numerics.derivative_n)")

    ctx = eval_context(scenario, link)
    zeta = ctx.zeta
    lt_h = _road_lt("h", scenario, link)
    lt_v = _road_lt("v", scenario, link)
    if k0 == 1:
        return (math.exp(-ctx.tilde_n * zeta) * lt_h(zeta) * lt_v(zeta))
    return _erlang_reception_sum(
        zeta, ctx.tilde_n, k0,
        lambda n: lt_h.derivative(zeta, n),
        lambda n: lt_v.derivative(zeta, n))


def reception_probability(scenario: Scenario, link: LinkSpec) -> float:
    """Dispatch to the most specific evaluation the scenario admits."""

    mac = scenario.mac
    if isinstance(mac, Csma) and _is_exponential(scenario.fading_useful):
        return reception_csma(scenario, link)
    if isinstance(mac, Aloha):
        rural = (all(_is_exponential(f) for f in
                     (scenario.fading_useful, scenario.fading_h,
                      scenario.fading_v))
                 and all(sp.norm == EUCLIDEAN and sp.alpha == 2.0 for sp in
                         (scenario.loss_useful, scenario.loss_h,
                          scenario.loss_v)))
        if rural:
            return reception_rural(scenario, link)
        urban = (isinstance(scenario.fading_useful, Erlang)
                 and scenario.loss_useful.norm == MANHATTAN
                 and isinstance(scenario.fading_v, Erlang)
                 and scenario.loss_v.norm == MANHATTAN
                 and _is_exponential(scenario.fading_h)
                 and scenario.loss_h.norm == EUCLIDEAN)
        if urban:
            return reception_urban(scenario, link)
    return reception_generic(scenario, link)


def throughput(scenario: Scenario, link: LinkSpec) -> float:
    """Link throughput in bits per unit time and bandwidth:

    access probability x reception probability x log2(1 + beta)."""

    mac = scenario.mac
    if isinstance(mac, Aloha):
        p_a = mac.p
    elif isinstance(mac, Csma):
        # The contention geometry is defined on the roads only.
        p_a = access_probability(link.tx, mac.delta, scenario.roads)
    else:
        p_a = 1.0
    return p_a * reception_probability(scenario, link) * math.log2(1.0 + link.beta)
