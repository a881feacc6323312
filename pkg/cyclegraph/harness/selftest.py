"""
Quick self-checks at reduced resolution.

Each check prints one PASS/FAIL line; the exit code is 0 iff all pass.
"""

import logging
import math
from typing import Callable, List, Tuple

import numpy as np

from cyclegraph.config import ContourConfig, GridConfig, LoopConfig, RieszConfig, RunConfig, ScanConfig
from cyclegraph.errors import CycleGraphError
from cyclegraph.harness.forward import build_potentials, compute_dataset, random_potentials
from cyclegraph.inverse import DirichletData, check_E_identity, gl_dirichlet_reconstruct, riesz_coefficients, riesz_synthesize
from cyclegraph.model import GraphGeometry, PotentialSet
from cyclegraph.ode import integrate_fundamental, zero_potential_endpoints
from cyclegraph.pipeline import run_inversion
from cyclegraph.spectral import CharFnSet, eval_delta0, find_real_zeros, signs_sigma

logger = logging.getLogger(__name__)

CheckResult = Tuple[bool, str]


def selftest_config() -> RunConfig:
    """Reduced resolutions that keep a full zero-potential round trip within seconds."""
    return RunConfig(
        grid=GridConfig(nodes_per_unit=129),
        contour=ContourConfig(sigma_max=16 * math.pi, n_nodes=1024),
        riesz=RieszConfig(n_modes=16),
        scan=ScanConfig(spectrum_rho_max=20 * math.pi, remainder_radius=16 * math.pi, remainder_points=257),
        loop=LoopConfig(n_pairs=12),
    )


def check_wronskian() -> CheckResult:
    rng = np.random.default_rng(7)
    geometry = GraphGeometry(m=1, T=(1.0, 1.0), a=2.0)
    worst = 0.0
    for _ in range(5):
        q = random_potentials(geometry, 257, 2.0, rng).q[1]
        lam = rng.uniform(0.0, 1e3, 20) * np.exp(1j * rng.uniform(-np.pi, np.pi, 20))
        ends = integrate_fundamental(q, lam)
        scale = np.abs(ends.C * ends.Sp) + np.abs(ends.Cp * ends.S) + 1.0
        worst = max(worst, float(np.max(ends.wronskian_defect() / scale)))
    return worst <= 1e-10, f"max relative Wronskian defect {worst:.2e}"


def check_zero_dirichlet() -> CheckResult:
    zeros = find_real_zeros(lambda lam: zero_potential_endpoints(lam, 1.0).S, (-1.0, (20.5 * np.pi) ** 2)).values
    expected = (np.pi * np.arange(1, 21)) ** 2
    if zeros.size < 20:
        return False, f"found {zeros.size} Dirichlet zeros"
    err = float(np.max(np.abs(zeros[:20] - expected) / expected))
    return err <= 1e-8, f"max relative deviation from (pi n)^2 {err:.2e}"


def check_delta_closed_form() -> CheckResult:
    geometry = GraphGeometry(m=2, T=(1.0, 1.3, 0.7), a=2.0)
    cf = CharFnSet(PotentialSet.zeros(geometry, 129))
    rng = np.random.default_rng(3)
    lam = rng.uniform(-50.0, 2000.0, 50) + 1j * rng.uniform(-20.0, 20.0, 50)
    direct, closed = cf.eval_delta(lam), eval_delta0(geometry, lam)
    err = float(np.max(np.abs(direct - closed) / np.maximum(np.abs(closed), 1e-300)))
    return err <= 1e-10, f"max relative deviation {err:.2e}"


def check_sigma_pattern() -> CheckResult:
    geometry = GraphGeometry(m=1, T=(1.0, 1.0), a=2.0)
    cf = CharFnSet(PotentialSet.zeros(geometry, 129))
    report = signs_sigma(cf, (np.pi * np.arange(1, 11)) ** 2)
    expected = np.array([(-1) ** n for n in range(1, 11)])
    return bool(np.array_equal(report.sigma, expected)), f"sigma = {report.sigma.tolist()}"


def check_E_identity_random() -> CheckResult:
    geometry = GraphGeometry(m=3, T=(1.0, 1.0, 0.8, 1.2), a=2.0)
    boundary = random_potentials(geometry, 257, 0.5, np.random.default_rng(11)).boundary
    lam = np.linspace(-20.0, 400.0, 25) + 3.0j
    defect = check_E_identity(boundary, lam)
    return defect <= 1e-8, f"max relative defect {defect:.2e}"


def check_riesz_round_trip() -> CheckResult:
    alpha, count = 1.0, 8
    t = np.linspace(-1.0, 1.0, 257)
    b = np.random.default_rng(5).normal(size=2 * 4 + 1)
    k = np.arange(-4, 5)
    f = np.exp(alpha * t) * (np.exp(-1j * np.pi * np.outer(t, k)) @ b)
    back = riesz_synthesize(riesz_coefficients(f, t, alpha, count), alpha, t)
    err = float(np.max(np.abs(back - f)))
    return err <= 1e-10, f"max deviation {err:.2e}"


def check_zero_round_trip() -> CheckResult:
    config = selftest_config()
    potentials = build_potentials(config)
    dataset = compute_dataset(potentials, config).dataset
    recovered = run_inversion(dataset, config)["recovered"]
    worst = float(np.max(recovered.norms()))
    return worst <= 1e-4, f"max |q_j| {worst:.2e}"


def check_gl_zero_data() -> CheckResult:
    n = np.arange(1, 21)
    data = DirichletData(lambda_n=(np.pi * n) ** 2, alpha_n=1.0 / (2.0 * np.pi ** 2 * n ** 2))
    q0 = gl_dirichlet_reconstruct(data, 20, 257).q0
    return q0.l2_norm() <= 1e-6, f"|q_0| {q0.l2_norm():.2e}"


CHECKS: List[Tuple[str, Callable[[], CheckResult]]] = [
    ("wronskian", check_wronskian),
    ("zero-potential Dirichlet spectrum", check_zero_dirichlet),
    ("Delta closed form", check_delta_closed_form),
    ("sigma pattern a=2", check_sigma_pattern),
    ("E identity", check_E_identity_random),
    ("Riesz round trip", check_riesz_round_trip),
    ("Gelfand-Levitan zero data", check_gl_zero_data),
    ("zero-potential forward/invert", check_zero_round_trip),
]


def run_selftest(emit: Callable[[str], None] = print) -> int:
    failures = 0
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except CycleGraphError as e:
            ok, detail = False, str(e)
        failures += not ok
        emit(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return 0 if failures == 0 else 1


__all__ = ["CHECKS", "run_selftest", "selftest_config"]
