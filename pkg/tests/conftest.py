import math
import os
import time
from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bhchaos.bhh import BhhParams, build_H
from bhchaos.chaos import gfd_columns
from bhchaos.compare import dos_maximum, eps_egoe_map
from bhchaos.egoe import EgoeParams, sample_goe
from bhchaos.experiments import GfdSample, bhh_eta_scan, bhh_windows, egoe_windows, ensemble_stats
from bhchaos.fock import SectorSpec, build_sector_basis
from bhchaos.spectra import full_diagonalize

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", deadline=None, max_examples=15, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: dict[str, str] = {}


def record_acceptance(key: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[key] = f"{key:<4} {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.fixture
def acceptance():
    return record_acceptance


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int("".join(c for c in k if c.isdigit()) or 0)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


# --------------------------------------------------------------------------- shared simulations
# Session-scoped so the module tests and the acceptance run reuse the expensive ensembles.
# Seed 0 throughout, fixed before any result was inspected.

SEED = 0
C5_ETAS = tuple(float(x) for x in np.geomspace(1e-3, 10.0, 30))
C8_ETAS = tuple(float(x) for x in np.linspace(0.25, 0.38, 5))
LAMBDAS = (0.01, 0.5, 1.0, 2.0)


def hwbc_odd(n: int) -> SectorSpec:
    return SectorSpec("hwbc", n, n, parity=-1)


@dataclass
class EgoeRuns:
    """Per-realization GFD windows keyed by (lambda, eps)."""

    samples: dict

    def stats(self, lam: float, eps: float, q: str = "d1"):
        return ensemble_stats(self.samples[(lam, eps)], q)


def _egoe_runs(n, lam_targets, realizations):
    b = build_sector_basis(hwbc_odd(n))
    out = {}
    for lam, targets in lam_targets.items():
        reals = egoe_windows(EgoeParams(n, n, lam, seed=SEED), b, targets, 100, realizations)
        for t in targets:
            out[(lam, float(t))] = [r.windows[float(t)] for r in reals]
    return EgoeRuns(out)


@pytest.fixture(scope="session")
def egoe7():
    """N=L=7 ensembles: strength scan at the band centre, several energies at lambda=1."""
    targets = {lam: (0.5,) for lam in LAMBDAS}
    targets[1.0] = (0.2, 0.35, 0.5, 0.65, 0.8)
    return _egoe_runs(7, targets, 100)


@pytest.fixture(scope="session")
def goe1024():
    """D1, R2 and Dinf of every eigenvector of 200 GOE matrices of dimension 1024."""
    t0 = time.perf_counter()
    d1, r2, dinf = [], [], []
    for r in range(200):
        _, V = np.linalg.eigh(sample_goe(1024, SEED, r).matrix)
        d1.append(gfd_columns(V, 1))
        r2.append(np.sum(V**4, axis=0))
        dinf.append(gfd_columns(V, math.inf))
    return {"d1": np.array(d1), "r2": np.array(r2), "dinf": np.array(dinf), "seconds": time.perf_counter() - t0}


@pytest.fixture(scope="session")
def bhh8_scan():
    """N=L=8 windows of 100 states at eps=0.5 across the default eta grid."""
    return dict(zip(C5_ETAS, bhh_eta_scan(hwbc_odd(8), C5_ETAS, 0.5, 100)))


@dataclass
class C6Data:
    eps_star: float
    eps_egoe: float
    bhh: GfdSample
    egoe: EgoeRuns


@pytest.fixture(scope="session")
def c6_data():
    """BHH at (eps=0.4, eta=0.2) and N=L=8 EGOE windows at the mapped energy and at the band centre."""
    spec = hwbc_odd(8)
    b = build_sector_basis(spec)
    p = BhhParams.from_eta(0.2, 8, 8)
    star = dos_maximum(full_diagonalize(build_H(p, b), want_vectors=False).eps)
    eps_egoe = eps_egoe_map(0.4, 0.2, {0.2: star})
    bhh = bhh_windows(p, b, [0.4], 100)[0.4]
    egoe = _egoe_runs(8, {1.0: (eps_egoe, 0.5)}, 100)
    return C6Data(star, eps_egoe, bhh, egoe)


@pytest.fixture(scope="session")
def compare_data(egoe7, c6_data):
    """Pooled chaotic BHH windows and EGOE band-centre windows for N=L=7, 8, 9."""
    bhh = {n: GfdSample.concat(bhh_eta_scan(hwbc_odd(n), C8_ETAS, 0.5, 100)) for n in (7, 8, 9)}
    egoe = {
        7: egoe7.samples[(1.0, 0.5)],
        8: c6_data.egoe.samples[(1.0, 0.5)],
        # two realizations at dim 12120 (a few minutes each)
        9: _egoe_runs(9, {1.0: (0.5,)}, 2).samples[(1.0, 0.5)],
    }
    dims = {n: build_sector_basis(hwbc_odd(n)).dim for n in (7, 8, 9)}
    return bhh, egoe, dims
