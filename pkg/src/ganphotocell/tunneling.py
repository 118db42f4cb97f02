"""Band profile of a single dot and WKB tunneling rates out of it.

Positions are in nm along the growth axis with the origin at the dot centre;
energies are conduction-band potentials in eV measured from the CBM at the
dot centre. Inside the dot the built-in field tilts the band downhill towards
the tunneling edge at ``x = +w_d/2``; beyond it sits the barrier and then the
n-side bulk.

The closed-form rate integrates the action across a barrier whose potential
climbs with slope ``F_d`` until it has risen by ``F_br * w_br``. A barrier
that rises with its own slope ``F_br`` over ``w_br`` gives a slightly
different exponent (``F_d`` in the prefactor is replaced by ``F_br``). The
default profile follows the closed form so the two routes agree; pass
``match_closed_form=False`` to :func:`build_profile` for the literal barrier.
"""
import math
from dataclasses import dataclass

from scipy import integrate

from .constants import CODATA
from .errors import DomainError, QuadratureFailure

DOT = "dot"
BARRIER = "barrier"
BULK = "bulk"

BULK_LENGTH_NM = 2.0


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    v_start: float
    slope: float  # eV / nm
    region: str

    @property
    def v_end(self):
        return self.v_start + self.slope * (self.end - self.start)

    @property
    def width(self):
        return self.end - self.start

    def potential(self, x):
        return self.v_start + self.slope * (x - self.start)


@dataclass(frozen=True)
class BandProfile:
    segments: tuple

    def __post_init__(self):
        for left, right in zip(self.segments, self.segments[1:]):
            if not math.isclose(left.end, right.start, rel_tol=0, abs_tol=1e-12):
                raise ValueError("profile segments must be contiguous")
        for seg in self.segments:
            if seg.end < seg.start:
                raise ValueError("segment with negative width")

    def region(self, name):
        for seg in self.segments:
            if seg.region == name:
                return seg
        raise KeyError(name)

    def potential(self, x):
        for seg in self.segments:
            if seg.start <= x <= seg.end:
                return seg.potential(x)
        raise ValueError(f"x={x} outside profile")

    @property
    def barrier_top(self):
        """Highest potential reached inside the barrier."""
        seg = self.region(BARRIER)
        return max(seg.v_start, seg.v_end)


@dataclass(frozen=True)
class TunnelSpec:
    E_star: float
    m_eff: float
    profile: BandProfile


def barrier_base(p):
    """Barrier height at the tunneling edge of the dot, ``dE_c - F_d w_d / 2``."""
    return p.delta_E_c - p.F_d * p.w_d / 2.0


def build_profile(p, match_closed_form=True):
    """Piecewise-linear conduction band: dot, barrier, bulk.

    The dot spans ``[-w_d/2, w_d/2]`` with ``V = -F_d x``. The barrier starts
    ``delta_E_c`` above the dot edge and rises by ``F_br * w_br`` (the field
    changes direction outside the dot). The bulk, a further heterointerface
    step of ``delta_E_c`` down, is flat.
    """
    half = p.w_d / 2.0
    dot = Segment(-half, half, p.F_d * half, -p.F_d, DOT)
    rise = p.F_br * p.w_br
    if match_closed_form and p.F_d > 0:
        width, slope = rise / p.F_d, p.F_d
    else:
        width, slope = p.w_br, p.F_br
    if width == 0:
        slope = 0.0
    barrier = Segment(half, half + width, barrier_base(p), slope, BARRIER)
    bulk_v = barrier.v_end - p.delta_E_c
    bulk = Segment(barrier.end, barrier.end + BULK_LENGTH_NM, bulk_v, 0.0, BULK)
    return BandProfile((dot, barrier, bulk))


def _forbidden_interval(seg, E):
    """Sub-interval of a linear segment where V > E, or None."""
    v0, v1 = seg.v_start, seg.v_end
    if v0 <= E and v1 <= E:
        return None
    if v0 > E and v1 > E:
        return seg.start, seg.end
    x_turn = seg.start + (E - v0) / seg.slope
    return (x_turn, seg.end) if v1 > E else (seg.start, x_turn)


def wkb_transmission_numeric(spec, rtol=1e-10, atol=1e-14, constants=CODATA):
    """WKB transmission through the barrier by adaptive quadrature.

    Only the forbidden part of the barrier segment contributes; the dot and
    bulk are classically allowed at tunneling energies. Returns 1.0 when the
    energy clears the whole barrier.
    """
    seg = spec.profile.region(BARRIER)
    E = spec.E_star
    interval = _forbidden_interval(seg, E)
    if interval is None or interval[1] <= interval[0]:
        return 1.0
    k = math.sqrt(2.0 * spec.m_eff * constants.electron_rest_energy) / constants.hbar_c

    def integrand(x):
        return math.sqrt(max(seg.potential(x) - E, 0.0))

    action, err = integrate.quad(integrand, *interval, epsabs=atol, epsrel=rtol, limit=200)
    if err > max(atol, rtol * abs(action)):
        raise QuadratureFailure(f"action integral error {err:.3g} exceeds tolerance")
    return math.exp(-2.0 * k * action)


def classical_region(E_star, F_d, w_d, clamp=True):
    """Width of the classically allowed part of the dot at energy `E_star`."""
    R = E_star / F_d + w_d / 2.0
    return min(R, w_d) if clamp else R


def assault_frequency(E_star, F_d, w_d, m_eff, clamp=True, constants=CODATA):
    """Classical bounce frequency (1/ns) of a carrier confined in the dot.

    The carrier reaches the tunneling edge with kinetic energy
    ``E_star + F_d w_d / 2`` after crossing a region of width ``R``; the
    frequency is ``v / (2 R)``. With ``clamp`` the region never exceeds the
    dot width.
    """
    if E_star < 0:
        raise DomainError(f"E_star must be non-negative, got {E_star}")
    if F_d <= 0:
        raise DomainError(f"F_d must be positive, got {F_d}")
    R = classical_region(E_star, F_d, w_d, clamp)
    kinetic = E_star + F_d * w_d / 2.0
    v = constants.c * math.sqrt(2.0 * kinetic / (m_eff * constants.electron_rest_energy))
    return v / (2.0 * R)


def wkb_exponent(E_star, p, m_eff=None, constants=CODATA):
    """Closed-form ``2 * action / hbar`` for the linear barrier (dimensionless)."""
    m = p.m_e_eff if m_eff is None else m_eff
    base = barrier_base(p)
    upper = base + p.F_br * p.w_br - E_star
    lower = base - E_star
    if upper < 0 or lower < 0:
        raise DomainError(f"E_star={E_star} eV lies above the barrier edge {base:.6g} eV")
    k = math.sqrt(2.0 * m * constants.electron_rest_energy) / constants.hbar_c
    return 4.0 * k / (3.0 * p.F_d) * (upper**1.5 - lower**1.5)


def tunneling_rate_closed_form(E_star, p, clamp=True, constants=CODATA):
    """Electron escape rate (1/ns) at energy `E_star` above the dot-centre CBM.

    Raises DomainError above the barrier edge; :func:`tunneling_rate` maps that
    case to unit transmission.
    """
    nu = assault_frequency(E_star, p.F_d, p.w_d, p.m_e_eff, clamp, constants)
    return nu * math.exp(-wkb_exponent(E_star, p, constants=constants))


def tunneling_rate(E_star, p, clamp=True, constants=CODATA):
    try:
        return tunneling_rate_closed_form(E_star, p, clamp, constants)
    except DomainError:
        if E_star < 0:
            raise
        return assault_frequency(E_star, p.F_d, p.w_d, p.m_e_eff, clamp, constants)
