"""Published benchmark pairs, transcribed to 5 significant digits.

Each entry carries the input pair, the initial GCRD estimate that was
reported alongside it and the objective values reported for it. Because
the inputs are rounded, only orders of magnitude are expected to match.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ore import DiffPoly, parse_diffpoly


@dataclass(frozen=True)
class Benchmark:
    name: str
    f: DiffPoly
    g: DiffPoly
    h_guess: DiffPoly
    noise: float
    initial_phi: float
    final_phi: float
    hessian_cond: float
    hessian_min_eig: float
    exact_h: DiffPoly | None = None


def three_factor_exact() -> Benchmark:
    """Noise-free pair whose exact GCRD is ``(D + 4t - 1)(D - 1)^2``."""
    f = parse_diffpoly(
        ".00769*D^5+(.00035*t^2+.05386*t-.05386)*D^4"
        "+(.00140*t^3+.06820*t^2-.16928*t+.17313)*D^3"
        "+(-.09513*t^3+.22559*t^2+.16928*t-.33472)*D^2"
        "+(.18607*t^3-.65720*t^2-.04617*t+.32702)*D"
        "+(-.09234*t^3+.36305*t^2-.00769*t-.11927)"
    )
    g = parse_diffpoly(
        "(.01001*t-.01001)*D^5+(.04019*t^2-.07007*t+.03003)*D^4"
        "+(.00063*t^3-.01048*t^2+.15014*t-.11010)*D^3"
        "+(.27901*t^3-.32921*t^2-.09008*t+.17016)*D^2"
        "+(-.55990*t^3+.52909*t^2-.04004*t-.08007)*D"
        "+(.28026*t^3-.22959*t^2+.04004*t)"
    )
    h = parse_diffpoly(".09285*D^3+(.37139*t-.27854)*D^2+(-.74278*t+.27854)*D+(.37139*t-.09285)")
    # built with the operator product; a commutative expansion would be wrong
    exact = DiffPoly.d() + DiffPoly.from_poly([-1.0, 4.0])
    exact = exact * (DiffPoly.d() - 1.0) * (DiffPoly.d() - 1.0)
    return Benchmark("three_factor_exact", f, g, h, 0.0, 4.04506e-14, 2.33030e-20, 18354.38336, 0.00314, exact)


def three_factor_noisy() -> Benchmark:
    """Same factor structure with relative noise 1e-5.

    The printed coefficients contain evident typesetting slips (a missing
    opening parenthesis and a doubled sign); the obvious repair is used, so
    this pair is only suitable for order-of-magnitude checks.
    """
    f = parse_diffpoly(
        ".00583*D^5"
        "+(-9.45614e-7*t^3+.00027*t^2+.03498*t-.03498)*D^4"
        "+(-8.26797e-7*t^5+.04743*t^3+.01113*t^2-.05247*t+.07287)*D^3"
        "+(-9.08565e-8*t^5+.13885*t^4-.21623*t^3+.30950*t^2-.17781*t-.05247)*D^2"
        "+(-.18655*t^5-.02226*t^4-.20166*t^3-.41974*t^2+.33812*t-.10202)*D"
        "+(.18655*t^5-.30315*t^4+.43935*t^3-.22868*t^2-.13117*t+.15740)"
    )
    g = parse_diffpoly(
        "(.00780*t-.00779)*D^5"
        "+(9.10928e-7*t^5+6.83196e-7*t^3+.02351*t^2-.07018*t+.02729)*D^4"
        "+(5.94796e-8*t^4+.02376*t^3-.07822*t^2+.12086*t-.06238)*D^3"
        "+(.16326*t^4+.04654*t^3-.27267*t^2+.12476*t+.03898)*D^2"
        "+(-.21833*t^5-.10868*t^4-.05617*t^3+.63939*t^2-.38597*t+.14036)*D"
        "+(.21833*t^5-.27291*t^4-.01462*t^3-.09418*t^2+.24952*t-.12086)"
    )
    h = parse_diffpoly(
        ".11192*D^3+(.33514*t-.22357)*D^2+(-.44667*t^2-.22358*t-.11327)*D+.44754*t^2-.55869*t+.22453"
    )
    return Benchmark("three_factor_noisy", f, g, h, 1e-5, 3e-5, 1.06759e-10, 21971.20356, 0.00818)


def second_order_noisy() -> Benchmark:
    """Pair of third-order operators with a second-order GCRD and noise 1e-4."""
    f = parse_diffpoly(
        "(.11329*t^6+.23414*t^5+.12840*t^4+.00755*t^3+.00005)*D^3"
        "+(.00001*t^6+.23414*t^5+.59667*t^4+.02269*t^3-.04528*t^2-.02266*t+3.67436e-7)*D^2"
        "+(-.11329*t^6+.33231*t^5-.43054*t^4-.00754*t^3-.00003*t^2-.06798*t+.00003)*D"
        "+(-.00001*t^6-.23414*t^5+.34741*t^4+.01510*t^3-.06799*t^2+.09064*t+.00004)"
    )
    g = parse_diffpoly(
        "(.01938*t^4-.03876*t^3-.07752*t^2+.03876*t+.05819)*D^3"
        "+(.13567*t^4+.23252*t^3-.07750*t^2-.34879*t+.29066)*D^2"
        "+(-.01938*t^4+.13563*t^3+.03873*t^2+.25195*t-.23257)*D"
        "+(-.13562*t^4+.44570*t^3-.56198*t^2-.03874*t+.17439)"
    )
    h = parse_diffpoly("(t^2+1.94162*t+.93768)*D^2+2.87182*D+(-.94502*t^2+2.84696*t-3.82712)")
    return Benchmark("second_order_noisy", f, g, h, 1e-4, 0.00328, 9.53931e-9, 148.62547, 0.04615)


ALL = {b.__name__: b for b in (three_factor_exact, three_factor_noisy, second_order_noisy)}
