"""Command-line driver: declarative runs that emit figure-backing data files.

A run is described by a :class:`RunConfig`, read from a flat ``key = value``
file (``--config``) and overridden by explicit command-line flags.
"""

from __future__ import annotations

import argparse
import ast
import dataclasses
import hashlib
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence

from . import __version__
from .baselines import GoeBaseline, QuadratureError, goe_d1_stats, goe_d2_stats, goe_dinf_moment, goe_dinf_pdf
from .bhh import BhhParams, build_H
from .chaos import MIN_LEVELS, energy_resolved_scan, moment_stats
from .compare import (
    MIN_EDGEWORTH_SAMPLES, GaussianModel, compare_to_model, dos_maximum, edgeworth_fit, eps_egoe_map,
    eps_egoe_percentile, gaussian_fit, histogram_as_density, histogram_density,
)
from .egoe import EgoeParams, sample_egoe
from .experiments import GfdSample, _ordered_map, bhh_eta_scan, egoe_windows, ensemble_stats, windows
from .fock import BC, CapacityError, SectorSpec, UnsupportedSectorError, basis_dimension, build_sector_basis
from .matrix import write_binary, write_triplets_csv
from .output import write_csv, write_json
from .spectra import DENSE_CAP, DimensionCapError, SpectrumError, dos_histogram, full_diagonalize

EXPERIMENTS = ("basis", "spectrum", "scan", "egoe-scan", "lambda-scan", "compare", "baselines")
DEFAULT_ETA_GRID = tuple(float(x) for x in np.geomspace(1e-3, 10.0, 30))
COMPARE_ETA_GRID = tuple(float(x) for x in np.linspace(0.25, 0.38, 5))
QUANTIFIERS = ("d1", "d2", "dinf")
PERCENTILE_POOL = 5
Q_VALUE = {"d1": 1, "d2": 2, "dinf": "inf"}


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class RunConfig:
    experiment: str = "spectrum"
    n: int = 5
    l: int = 5
    bc: str = "hwbc"
    q: int | None = None
    parity: int | None = None
    basis: str = "interaction"
    model: str = "bhh"
    eta: float = 0.19
    eta_grid: tuple | None = None
    eps: tuple = (0.5,)
    k_states: int = 100
    lam: tuple = (1.0,)
    realizations: int = 100
    seed: int = 0
    threads: int = 1
    out: str = "out"
    format: str = "csv"
    bins: int = 100
    dims: tuple = (126, 1024)
    eps_map: str = "none"
    export_basis: bool = False
    method: str = "auto"

    def resolved_eta_grid(self) -> tuple:
        if self.eta_grid is not None:
            return tuple(self.eta_grid)
        return COMPARE_ETA_GRID if self.experiment == "compare" else DEFAULT_ETA_GRID

    def validate(self) -> "RunConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment {self.experiment!r}")
        for name in ("n", "l", "k_states", "realizations", "threads", "bins"):
            val = getattr(self, name)
            if not isinstance(val, int) or isinstance(val, bool):
                raise ConfigError(name, f"expected an integer, got {val!r}")
        if self.n < 1 or self.l < 1:
            raise ConfigError("n" if self.n < 1 else "l", "must be >= 1")
        for name in ("k_states", "realizations", "threads", "bins"):
            if getattr(self, name) < 1:
                raise ConfigError(name, "must be >= 1")
        if self.bc not in ("hwbc", "pbc"):
            raise ConfigError("bc", f"expected hwbc or pbc, got {self.bc!r}")
        if self.basis not in ("interaction", "tunneling"):
            raise ConfigError("basis", f"expected interaction or tunneling, got {self.basis!r}")
        if self.model not in ("bhh", "egoe", "goe"):
            raise ConfigError("model", f"expected bhh, egoe or goe, got {self.model!r}")
        if self.format not in ("csv", "json", "bin"):
            raise ConfigError("format", f"expected csv, json or bin, got {self.format!r}")
        if self.format == "bin" and self.experiment != "spectrum":
            raise ConfigError("format", "binary output is only available for the spectrum experiment")
        if self.eps_map not in ("none", "dos-max", "percentile"):
            raise ConfigError("eps_map", f"expected none, dos-max or percentile, got {self.eps_map!r}")
        if self.method not in ("auto", "full", "dense", "shift-invert"):
            raise ConfigError("method", f"unknown eigensolver method {self.method!r}")
        if self.parity not in (None, 1, -1):
            raise ConfigError("parity", f"expected +1 or -1, got {self.parity!r}")
        grid = self.resolved_eta_grid()
        if len(grid) == 0:
            raise ConfigError("eta_grid", "must be non-empty")
        if any(not (isinstance(x, (int, float)) and x >= 0) for x in grid):
            raise ConfigError("eta_grid", "entries must be non-negative numbers")
        if self.eta < 0:
            raise ConfigError("eta", "must be >= 0")
        if len(self.eps) == 0:
            raise ConfigError("eps", "must be non-empty")
        if any(not 0 <= e <= 1 for e in self.eps):
            raise ConfigError("eps", "targets must lie in [0, 1]")
        if len(self.lam) == 0 or any(x < 0 for x in self.lam):
            raise ConfigError("lam", "must be a non-empty list of non-negative numbers")
        if len(self.dims) == 0 or any(int(d) < 2 for d in self.dims):
            raise ConfigError("dims", "must be a non-empty list of integers >= 2")
        try:
            self.sector()
        except (ValueError, UnsupportedSectorError) as exc:
            raise ConfigError("sector", str(exc)) from exc
        return self

    def sector(self) -> SectorSpec:
        return SectorSpec(self.bc, self.n, self.l, self.q, self.parity, self.basis)

    def payload_fields(self) -> dict:
        """Fields that determine the output payload (not where or how fast it is written)."""
        d = dataclasses.asdict(self)
        for key in ("out", "threads"):
            d.pop(key)
        d["eta_grid"] = list(self.resolved_eta_grid())
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.payload_fields(), sort_keys=True, default=list)
        return hashlib.sha256(blob.encode()).hexdigest()

    def metadata(self, **extra) -> dict:
        meta = {"tool": "bhchaos", "version": __version__, "experiment": self.experiment,
                "config_hash": self.config_hash(), "seed": self.seed}
        meta.update(extra)
        return meta


# --------------------------------------------------------------------------- config parsing

_FIELD_TYPES = {f.name: f for f in dataclasses.fields(RunConfig)}
_ALIASES = {"lambda": "lam", "k-states": "k_states", "eta-grid": "eta_grid", "eps-map": "eps_map",
            "export-basis": "export_basis", "N": "n", "L": "l", "Q": "q"}


def parse_grid(text) -> tuple:
    """Accepts a list, ``"a,b,c"``, ``"log:lo:hi:n"`` or ``"lin:lo:hi:n"``."""
    if isinstance(text, (list, tuple)):
        return tuple(float(x) for x in text)
    if isinstance(text, (int, float)):
        return (float(text),)
    text = str(text).strip()
    if text.startswith(("log:", "lin:")):
        kind, lo, hi, n = text.split(":")
        n = int(n)
        if n < 1:
            return ()
        f = np.geomspace if kind == "log" else np.linspace
        return tuple(float(x) for x in f(float(lo), float(hi), n))
    if text in ("", "[]"):
        return ()
    return tuple(float(x) for x in text.strip("[]()").split(",") if x.strip())


def _coerce(name: str, value):
    if name in ("eta_grid", "eps", "lam"):
        return parse_grid(value)
    if name == "dims":
        return tuple(int(float(x)) for x in parse_grid(value))
    if name in ("q", "parity"):
        if value in (None, "none", "None", ""):
            return None
        return int(value)
    if name in ("n", "l", "k_states", "realizations", "seed", "threads", "bins"):
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(name, f"expected an integer, got {value!r}")
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(name, f"expected an integer, got {value!r}") from None
    if name == "eta":
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(name, f"expected a number, got {value!r}") from None
    if name == "export_basis":
        return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes")
    return str(value)


def load_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment; values are Python literals or bare strings."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    for num, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"line {num}: expected 'key = value'")
        key, _, val = (s.strip() for s in line.partition("="))
        key = _ALIASES.get(key, key.replace("-", "_"))
        if key not in _FIELD_TYPES:
            raise ConfigError(key, f"unknown configuration key (line {num})")
        try:
            parsed = ast.literal_eval(val)
        except (ValueError, SyntaxError):
            parsed = val
        out[key] = _coerce(key, parsed)
    return out


def build_config(experiment: str | None, file_values: dict, flag_values: dict) -> RunConfig:
    merged = {**file_values, **{k: v for k, v in flag_values.items() if v is not None}}
    if experiment is not None:
        merged["experiment"] = experiment
    return RunConfig(**merged).validate()


# --------------------------------------------------------------------------- experiments


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _table(cfg: RunConfig, stem: str, columns, rows, meta) -> Path:
    out = _out_dir(cfg)
    if cfg.format == "json":
        return write_json(out / f"{stem}.json", {"columns": list(columns), "rows": [list(r) for r in rows]}, meta)
    return write_csv(out / f"{stem}.csv", list(columns), rows, meta)


def run_basis(cfg: RunConfig) -> list[Path]:
    N, L = cfg.n, cfg.l
    full = basis_dimension(N, L)
    rows = [("full", full)]
    if cfg.bc == "hwbc":
        parts = [SectorSpec("hwbc", N, L, parity=p, basis=cfg.basis) for p in (1, -1)]
    else:
        parts = [SectorSpec("pbc", N, L, Q=0, parity=p, basis=cfg.basis) for p in (1, -1)]
    total = 0
    for spec in parts:
        dim = build_sector_basis(spec).dim
        total += dim
        rows.append((spec.label(), dim))
    if cfg.bc == "pbc":
        rows.append(("pbc Q!=0 (complement)", full - total))
        total = full
    rows.append(("sum of sectors", total))
    meta = cfg.metadata(N=N, L=L, bc=cfg.bc)
    paths = [_table(cfg, "sectors", ("sector", "dim"), rows, meta)]
    if cfg.export_basis:
        b = build_sector_basis(cfg.sector())
        cols = ["index"] + [f"occ_{j + 1}" for j in range(L)] + ["norm"]
        brows = [(i, *b.reps[i].tolist(), float(b.norms[i])) for i in range(b.dim)]
        paths.append(_table(cfg, "basis_states", cols, brows, cfg.metadata(sector=b.spec.label(), dim=b.dim)))
    return paths


def _model_matrix(cfg: RunConfig, b, realization: int = 0, lam: float | None = None):
    if cfg.model == "bhh":
        return build_H(BhhParams.from_eta(cfg.eta, cfg.n, cfg.l, cfg.bc, cfg.basis), b)
    lam = cfg.lam[0] if lam is None else lam
    return sample_egoe(EgoeParams(cfg.n, cfg.l, lam, reflection_symmetric=True, seed=cfg.seed), b, realization)


def run_spectrum(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    if cfg.model == "goe":
        raise ConfigError("model", "spectrum supports bhh and egoe")
    b = build_sector_basis(cfg.sector())
    if b.dim > DENSE_CAP:
        raise DimensionCapError(f"sector dimension {b.dim} exceeds the dense cap {DENSE_CAP}")
    m = _model_matrix(cfg, b)
    s = full_diagonalize(m, want_vectors=False)
    dos = dos_histogram(s, cfg.bins)
    ew = edgeworth_fit(s.eps) if s.eps.size >= MIN_EDGEWORTH_SAMPLES else None
    gauss = gaussian_fit(s.eps)
    meta = cfg.metadata(sector=b.spec.label(), dim=b.dim, model=cfg.model, nnz=m.nnz, E_min=s.E_min, E_max=s.E_max)
    paths = [_table(cfg, "spectrum", ("index", "E", "eps"),
                    [(i, e, x) for i, (e, x) in enumerate(zip(s.eigenvalues, s.eps))], meta)]
    paths.append(_table(cfg, "dos", ("bin_lo", "bin_hi", "count"),
                        [(dos.bin_edges[i], dos.bin_edges[i + 1], int(c)) for i, c in enumerate(dos.counts)], meta))
    fits = {"eps_star_histogram": dos.eps_star, "gaussian": dataclasses.asdict(gauss),
            "edgeworth": None if ew is None else {k: getattr(ew, k) for k in ("mu", "sigma", "gamma1", "gamma2")},
            "eps_star_edgeworth": None if ew is None else ew.mode(0.0, 1.0)}
    paths.append(write_json(out / "dos_fits.json", fits, meta))
    if cfg.format == "bin":
        write_binary(m, out / "matrix.bin")
        paths.append(out / "matrix.bin")
    else:
        write_triplets_csv(m, out / "matrix.csv", meta)
        paths.append(out / "matrix.csv")
    return paths


def _window_rows(label_values: tuple, sample: GfdSample):
    rows = []
    for qname in QUANTIFIERS:
        ms = moment_stats(sample.values(qname))
        skew = float("nan") if ms.skew is None else ms.skew
        rows.append((*label_values, qname, ms.mean, ms.stderr_mean, ms.var, ms.stderr_var, skew, ms.count))
    return rows


WINDOW_COLUMNS = ("quantifier", "mean", "stderr_mean", "var", "stderr_var", "skew", "count")


def run_scan(cfg: RunConfig) -> list[Path]:
    spec = cfg.sector()
    b = build_sector_basis(spec)
    grid = cfg.resolved_eta_grid()

    def one(eta):
        return full_diagonalize(build_H(BhhParams.from_eta(eta, cfg.n, cfg.l, cfg.bc, cfg.basis), b), True)

    spectra = dict(zip(grid, _ordered_map(one, grid, cfg.threads)))
    table = energy_resolved_scan(spectra, bins=cfg.bins)
    meta = cfg.metadata(sector=spec.label(), dim=b.dim, min_levels=MIN_LEVELS,
                        zero_spacings=json.dumps({repr(k): v for k, v in table.metadata["zero_spacings"].items()}))
    rows = [(r.eta, r.eps_bin_center, r.quantifier, r.value, r.stderr, r.count) for r in table.rows]
    paths = [_table(cfg, "scan", ("eta", "eps_bin_center", "quantifier", "value", "stderr", "count"), rows, meta)]
    dmax = []
    for eta in grid:
        s = spectra[eta]
        dmax.append((eta, dos_histogram(s, cfg.bins).eps_star, dos_maximum(s.eps)))
    paths.append(_table(cfg, "dos_max", ("eta", "eps_star_histogram", "eps_star_edgeworth"), dmax, meta))
    wrows = []
    for eta in grid:
        s = spectra[eta]
        for t, sample in windows(s, cfg.eps, cfg.k_states).items():
            wrows.extend(_window_rows((eta, t), sample))
    paths.append(_table(cfg, "windows", ("eta", "eps_target") + WINDOW_COLUMNS, wrows, meta))
    return paths


def _egoe_targets(cfg: RunConfig, b) -> tuple[list[float], list[tuple]]:
    """EGOE energies for the requested BHH energies, per the chosen mapping."""
    if cfg.eps_map == "none":
        return list(cfg.eps), [(e, e, "identity") for e in cfg.eps]
    bhh = full_diagonalize(build_H(BhhParams.from_eta(cfg.eta, cfg.n, cfg.l, cfg.bc, cfg.basis),
                                   build_sector_basis(SectorSpec(cfg.bc, cfg.n, cfg.l, cfg.q, cfg.parity))), False)
    if cfg.eps_map == "dos-max":
        star = dos_maximum(bhh.eps)
        mapped = [eps_egoe_map(e, cfg.eta, {cfg.eta: star}) for e in cfg.eps]
    else:
        # a single realization has its own spectral edges; pool a few for the cumulative fraction
        p = EgoeParams(cfg.n, cfg.l, cfg.lam[0], seed=cfg.seed)
        ref = np.concatenate([full_diagonalize(sample_egoe(p, b, r), False).eps
                              for r in range(min(cfg.realizations, PERCENTILE_POOL))])
        mapped = [eps_egoe_percentile(e, bhh, ref) for e in cfg.eps]
    return mapped, [(e, m, cfg.eps_map) for e, m in zip(cfg.eps, mapped)]


def run_egoe_scan(cfg: RunConfig) -> list[Path]:
    spec = cfg.sector()
    if spec.bc is not BC.HWBC and not spec.is_full:
        raise ConfigError("bc", "EGOE sectors are parity blocks of the open chain; use bc = hwbc")
    b = build_sector_basis(SectorSpec(cfg.bc, cfg.n, cfg.l, cfg.q, cfg.parity))
    targets, mapping = _egoe_targets(cfg, b)
    p = EgoeParams(cfg.n, cfg.l, cfg.lam[0], reflection_symmetric=True, seed=cfg.seed)
    reals = egoe_windows(p, b, targets, cfg.k_states, cfg.realizations, cfg.method, cfg.threads)
    meta = cfg.metadata(sector=b.spec.label(), dim=b.dim, lam=cfg.lam[0],
                        parity_block=str(cfg.parity), realizations=cfg.realizations)
    rows = []
    for (e_bhh, e_egoe, how), t in zip(mapping, targets):
        samples = [r.windows[float(t)] for r in reals]
        for qname in QUANTIFIERS:
            st = ensemble_stats(samples, qname)
            rows.append((e_bhh, e_egoe, how, qname, st.mean, st.stderr_mean, st.var, st.stderr_var,
                         st.realizations, st.states))
    cols = ("eps_bhh", "eps_egoe", "mapping", "quantifier", "mean", "stderr_mean", "var", "stderr_var",
            "realizations", "states")
    paths = [_table(cfg, "egoe_windows", cols, rows, meta)]
    full = [r.eps_all for r in reals if r.eps_all is not None]
    if full:
        counts = np.zeros(cfg.bins)
        for eps in full:
            counts += dos_histogram(eps, cfg.bins).counts
        edges = np.linspace(0, 1, cfg.bins + 1)
        drows = [(edges[i], edges[i + 1], counts[i] / len(full)) for i in range(cfg.bins)]
        paths.append(_table(cfg, "egoe_dos", ("bin_lo", "bin_hi", "mean_count"), drows, meta))
    return paths


def run_lambda_scan(cfg: RunConfig) -> list[Path]:
    b = build_sector_basis(SectorSpec(cfg.bc, cfg.n, cfg.l, cfg.q, cfg.parity))
    rows = []
    for lam in cfg.lam:
        p = EgoeParams(cfg.n, cfg.l, lam, reflection_symmetric=True, seed=cfg.seed)
        reals = egoe_windows(p, b, cfg.eps, cfg.k_states, cfg.realizations, cfg.method, cfg.threads)
        for t in cfg.eps:
            samples = [r.windows[float(t)] for r in reals]
            for qname in QUANTIFIERS:
                st = ensemble_stats(samples, qname)
                rows.append((lam, t, qname, st.mean, st.stderr_mean, st.var, st.stderr_var, st.realizations))
    meta = cfg.metadata(sector=b.spec.label(), dim=b.dim, realizations=cfg.realizations)
    cols = ("lambda", "eps", "quantifier", "mean", "stderr_mean", "var", "stderr_var", "realizations")
    return [_table(cfg, "lambda_scan", cols, rows, meta)]


def goe_reference(dim: int, qname: str):
    """(mean, density) of the GOE prediction for D̃_q at dimension ``dim``."""
    if qname == "d1":
        m, v = goe_d1_stats(dim)
        return m, GaussianModel(m, math.sqrt(v))
    if qname == "d2":
        m, v = goe_d2_stats(dim)
        return m, GaussianModel(m, math.sqrt(v))
    return goe_dinf_moment(dim, 1), (lambda x: goe_dinf_pdf(x, dim))


def distance_reports(bhh: GfdSample, egoe: GfdSample, dim: int) -> list:
    """d_q and KL for GOE-BHH, EGOE-BHH and GOE-EGOE, for q = 1, 2, inf."""
    reports = []
    for qname in QUANTIFIERS:
        q = Q_VALUE[qname]
        x_b, x_e = bhh.values(qname), egoe.values(qname)
        goe_mean, goe_pdf = goe_reference(dim, qname)
        h_b, h_e = histogram_density(x_b), histogram_density(x_e)
        reports.append(compare_to_model(x_b, goe_mean, goe_pdf, q, ("GOE", "BHH"), dim, h_b))
        reports.append(compare_to_model(x_b, float(x_e.mean()), histogram_as_density(h_e), q, ("EGOE", "BHH"), dim, h_b))
        reports.append(compare_to_model(x_e, goe_mean, goe_pdf, q, ("GOE", "EGOE"), dim, h_e))
    return reports


def run_compare(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    spec = cfg.sector()
    b = build_sector_basis(spec)
    grid = cfg.resolved_eta_grid()
    eps = cfg.eps[0]
    bhh = GfdSample.concat(bhh_eta_scan(spec, grid, eps, cfg.k_states, cfg.method, cfg.threads))
    eb = build_sector_basis(SectorSpec(cfg.bc, cfg.n, cfg.l, cfg.q, cfg.parity))
    reals = egoe_windows(EgoeParams(cfg.n, cfg.l, cfg.lam[0], seed=cfg.seed), eb, [eps], cfg.k_states,
                         cfg.realizations, cfg.method, cfg.threads)
    egoe = GfdSample.concat(r.windows[float(eps)] for r in reals)
    reports = distance_reports(bhh, egoe, b.dim)
    meta = cfg.metadata(sector=spec.label(), dim=b.dim, eps=eps, eta_grid=list(grid),
                        binning="Freedman-Diaconis, at least 20 bins", kl="KL(histogram under test || reference)")
    paths = [write_json(out / "compare.json", {"reports": [r.as_dict() for r in reports]}, meta)]
    for name, sample in (("bhh", bhh), ("egoe", egoe)):
        for qname in QUANTIFIERS:
            h = histogram_density(sample.values(qname))
            rows = [(h.edges[i], h.edges[i + 1], h.densities[i]) for i in range(h.densities.size)]
            paths.append(write_csv(out / f"hist_{name}_{qname}.csv", ["lo", "hi", "density"], rows,
                                   {**meta, "n_samples": h.n_samples}))
    return paths


def run_baselines(cfg: RunConfig) -> list[Path]:
    rows = []
    for dim in cfg.dims:
        base = GoeBaseline.compute(int(dim))
        rows.extend(base.rows())
        rows.append((int(dim), "var_dinf", base.dinf_moments[2] - base.dinf_moments[1] ** 2))
    meta = cfg.metadata(dims=list(cfg.dims))
    paths = [_table(cfg, "baselines", ("dim", "quantity", "value"), rows, meta)]
    xs = np.linspace(0.005, 1.0, 200)
    prow = [(int(dim), x, p) for dim in cfg.dims for x, p in zip(xs, goe_dinf_pdf(xs, int(dim)))]
    paths.append(_table(cfg, "dinf_pdf", ("dim", "dinf", "density"), prow, meta))
    return paths


RUNNERS = {
    "basis": run_basis, "spectrum": run_spectrum, "scan": run_scan, "egoe-scan": run_egoe_scan,
    "lambda-scan": run_lambda_scan, "compare": run_compare, "baselines": run_baselines,
}


def run(cfg: RunConfig) -> list[Path]:
    return RUNNERS[cfg.experiment](cfg)


# --------------------------------------------------------------------------- argument parsing


def _parity(text: str) -> int:
    val = int(text)
    if val not in (1, -1):
        raise argparse.ArgumentTypeError("parity must be +1 or -1")
    return val


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    a = common.add_argument
    a("--config", help="flat key = value run configuration")
    a("--n", type=int, help="particle number N")
    a("--l", type=int, help="number of sites L")
    a("--bc", choices=("hwbc", "pbc"))
    a("--q", type=int, help="quasimomentum (PBC)")
    a("--parity", type=_parity, help="reflection parity +1 or -1")
    a("--basis", choices=("interaction", "tunneling"))
    a("--model", choices=("bhh", "egoe", "goe"))
    a("--eta", type=float, help="scaled tunneling strength J/(UN)")
    a("--eta-grid", dest="eta_grid", help="comma list, log:lo:hi:n or lin:lo:hi:n")
    a("--eps", help="scaled-energy targets (comma list)")
    a("--k-states", dest="k_states", type=int, help="eigenstates per target energy")
    a("--lambda", dest="lam", help="two-body strength(s) of the embedded ensemble")
    a("--realizations", type=int)
    a("--seed", type=int)
    a("--threads", type=int)
    a("--out", help="output directory")
    a("--format", choices=("csv", "json", "bin"))
    a("--bins", type=int, help="number of scaled-energy bins")
    a("--dims", help="dimensions for the GOE baselines (comma list)")
    a("--eps-map", dest="eps_map", choices=("none", "dos-max", "percentile"))
    a("--export-basis", dest="export_basis", action="store_const", const=True)
    a("--method", choices=("auto", "full", "dense", "shift-invert"))
    parser = argparse.ArgumentParser(prog="bhchaos", description="Bose-Hubbard and embedded-GOE chaos analysis")
    parser.add_argument("--version", action="version", version=f"bhchaos {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    flags = vars(args).copy()
    experiment = flags.pop("experiment")
    config_path = flags.pop("config")
    try:
        file_values = load_config_file(config_path) if config_path else {}
        flag_values = {k: (_coerce(k, v) if v is not None else None) for k, v in flags.items()}
        cfg = build_config(experiment, file_values, flag_values)
    except ConfigError as exc:
        print(f"bhchaos: configuration error: {exc}", file=sys.stderr)
        return 2
    except (TypeError, ValueError) as exc:
        print(f"bhchaos: configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        paths = run(cfg)
    except ConfigError as exc:
        print(f"bhchaos: configuration error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"bhchaos: capacity error: {exc}", file=sys.stderr)
        return 3
    except (SpectrumError, QuadratureError, ArpackError, ArpackNoConvergence, np.linalg.LinAlgError,
            FloatingPointError) as exc:
        print(f"bhchaos: numerical failure: {exc}", file=sys.stderr)
        return 4
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
