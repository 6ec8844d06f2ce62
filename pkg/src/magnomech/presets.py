"""Parameter sets and sweep layouts for each figure panel.

Detuning axes span [-2 omega_b, 2 omega_b]; the panels do not quote their
plot limits, so these ranges are a choice recorded in sweep metadata.
"""

from dataclasses import replace

from .constants import TWO_PI
from .errors import DomainError
from .model import DirectCoupling, PhysicalDrive, SystemParams
from .sweep import Axis, InnerOptimization, SweepSpec

OMEGA_B = TWO_PI * 10e6
DEFAULT_POINTS = 101
INSET_TEMPERATURES = (0.01, 0.30, 30)
INNER_POINTS = 401

FIGURES = (
    "fig2a",
    "fig2b",
    "fig2c",
    "fig2d",
    "fig3a",
    "fig3a_inset",
    "fig3b",
    "fig4a",
    "fig4b",
)


def fig2_params(coupling="direct") -> SystemParams:
    """Base parameters of the detuning maps, at the bipartite-optimal point."""
    if coupling == "direct":
        c = DirectCoupling(TWO_PI * 3.2e6)
    elif coupling == "physical":
        c = PhysicalDrive(b0=3.9e-5, g_mb=TWO_PI * 0.2)
    else:
        raise DomainError(f"unknown coupling mode {coupling!r}")
    return SystemParams(
        omega_a=TWO_PI * 10e9,
        omega_b=OMEGA_B,
        delta_a=-OMEGA_B,
        delta_m_eff=0.9 * OMEGA_B,
        kappa_a=TWO_PI * 1e6,
        kappa_m=TWO_PI * 1e6,
        gamma_b=TWO_PI * 100.0,
        g_ma=TWO_PI * 3.2e6,
        temperature=0.01,
        coupling=c,
    )


def fig3_params() -> SystemParams:
    return replace(fig2_params(), coupling=DirectCoupling(TWO_PI * 4.8e6))


def fig4_params() -> SystemParams:
    kappa_a = TWO_PI * 3e6
    return replace(fig3_params(), kappa_a=kappa_a, kappa_m=kappa_a / 5)


def _detuning_axis(name, base, points=DEFAULT_POINTS):
    return Axis(name, -2.0 * base.omega_b, 2.0 * base.omega_b, points)


def figure_preset(name: str) -> SweepSpec:
    """Sweep layout reproducing one figure panel."""
    if name in ("fig2a", "fig2b", "fig2c"):
        base = fig2_params()
        output = {"fig2a": "e_am", "fig2b": "e_mb", "fig2c": "e_ab"}[name]
        axes = (_detuning_axis("delta_a", base), _detuning_axis("delta_m_eff", base))
        return SweepSpec(base, axes, (output,))
    if name == "fig2d":
        base = fig2_params()
        axes = (_detuning_axis("delta_a", base), Axis("g_ratio", 0.0, 2.0, DEFAULT_POINTS))
        return SweepSpec(base, axes, ("e_am",))
    if name in ("fig3a", "fig3b", "fig4a", "fig4b"):
        base = fig3_params() if name.startswith("fig3") else fig4_params()
        outputs = ("e_am", "e_mb", "e_ab") if name.endswith("a") else ("r_min",)
        return SweepSpec(base, (_detuning_axis("delta_a", base),), outputs)
    if name == "fig3a_inset":
        base = fig3_params()
        lo, hi, n = INSET_TEMPERATURES
        inner = InnerOptimization(-2.0 * base.omega_b, 2.0 * base.omega_b, INNER_POINTS)
        return SweepSpec(base, (Axis("temperature", lo, hi, n),), ("e_am", "e_mb", "e_ab"), inner)
    raise DomainError(f"unknown figure {name!r}; expected one of {', '.join(FIGURES)}")
