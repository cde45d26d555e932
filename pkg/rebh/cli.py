"""Command line front end.

``rebh apply`` runs a multiple-testing procedure on a file of e-values or p-values,
``rebh merge`` computes a global-null merged p-value, and ``rebh simulate`` runs a
Monte Carlo sweep described by a JSON file. Results are JSON (apply, merge) or CSV
(simulate). Every randomized run reports the uniforms it used, so that passing them back
with ``--u`` reproduces it exactly. Vectors of uniforms are passed as a single
comma-separated argument, e.g. ``--u 0.3,0.8,0.1``.

Exit status is 0 on success and 2 on invalid input.
"""
import argparse
import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from rebh import __version__
from rebh.discovery import DiscoverySet
from rebh.merging import PMergingDual, hommel_p, merge_p, merge_p_randomized, u_hommel_p
from rebh.options import RebhOptions
from rebh.procedures import (
    bh, by, by_uniform_ratio, ebh, j_ebh, pe_ebh, r1_ebh, r2_ebh, rboth_ebh, u_by, u_ebh
)
from rebh.sim import SimulationConfig, run_sweep
from rebh.sim.experiment import SWEEP_COLUMNS
from rebh.utils import UniformSource

__all__ = ("Procedure", "MergeMethod", "RunManifest", "read_values", "cmd_apply", "cmd_merge",
           "cmd_simulate", "build_parser", "main")

FLOAT_FORMAT = "%.17g"

SIMULATE_KEYS = {
    "K": "number of hypotheses (default 50, or 100 with full_scale)",
    "pi0": "fraction of non-null hypotheses (default 0.3)",
    "mus": "list of non-null means (required)",
    "rhos": "list of dependence strengths in [0, 0.9] (required)",
    "dependence": "'toeplitz' or 'equicorrelated' (default 'toeplitz')",
    "lam": "e-value tilt; defaults to each mu",
    "trials": "Monte Carlo trials per grid point (default 200, or 500 with full_scale)",
    "alpha": "target level (default 0.05)",
    "seed": "root seed (default 0)",
    "procedures": "list of procedure names (required)",
    "u_mode": "'independent' or 'shared' (default 'independent')",
    "full_scale": "use the full-scale defaults for K and trials (default false)",
    "num_workers": "worker threads (default: physical cores)",
}


class Procedure(Enum):
    EBH = 'ebh'
    R1_EBH = 'r1-ebh'
    R2_EBH = 'r2-ebh'
    RBOTH_EBH = 'rboth-ebh'
    U_EBH = 'u-ebh'
    J_EBH = 'j-ebh'
    PE_EBH = 'pe-ebh'
    BY_RATIO = 'by-ratio'
    BH = 'bh'
    BY = 'by'
    U_BY = 'u-by'

    def __str__(self):
        return self.value

    def __repr__(self):
        return str(self)

    @property
    def takes_pvalues(self) -> bool:
        return self in (Procedure.BH, Procedure.BY, Procedure.U_BY)

    @property
    def uniforms(self) -> str:
        """``"none"``, ``"single"`` or ``"vector"``: the uniforms the procedure consumes."""
        if self in (Procedure.U_EBH, Procedure.U_BY):
            return "single"
        if self in (Procedure.R1_EBH, Procedure.R2_EBH, Procedure.RBOTH_EBH, Procedure.J_EBH,
                    Procedure.BY_RATIO):
            return "vector"
        return "none"


class MergeMethod(Enum):
    HOMMEL = 'hommel'
    U_HOMMEL = 'u-hommel'
    GRID_HARMONIC = 'grid-harmonic'

    def __str__(self):
        return self.value

    def __repr__(self):
        return str(self)


@dataclass
class RunManifest:
    """What is needed to replay a run: the input's digest, the seed and the uniforms drawn."""
    command: str
    input_digest: str
    procedure: str
    alpha: Optional[float] = None
    seed: Optional[int] = None
    u_source: str = "none"
    u_draws: Optional[Any] = None
    u_adapt_draws: Optional[List[float]] = None
    outputs: List[str] = field(default_factory=list)
    version: str = __version__

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


def file_digest(path: str) -> str:
    with open(path, "rb") as fh:
        return "sha256:" + hashlib.sha256(fh.read()).hexdigest()


def read_values(path: str) -> np.ndarray:
    """Read one number per line, allowing a single header line and ``inf``.

    Raises
    ------
    ValueError
        With the offending line number, for unparseable, NaN or negative entries, for more
        than one column, and for files without values.
    """
    try:
        df = pd.read_csv(path, header=None, dtype=str, skip_blank_lines=False,
                         keep_default_na=False, na_filter=False)
    except pd.errors.EmptyDataError:
        raise ValueError("%s: no values found" % (path)) from None
    if df.shape[1] != 1:
        raise ValueError("%s: expected a single column, found %d" % (path, df.shape[1]))

    values = []
    seen_line = False
    for lineno, raw in enumerate(df.iloc[:, 0], start=1):
        text = raw.strip()
        if text == "":
            continue
        try:
            value = float(text)
        except ValueError:
            if not seen_line:
                # header
                seen_line = True
                continue
            raise ValueError("%s:%d: cannot parse %r as a number" % (path, lineno, text)) from None
        seen_line = True
        if np.isnan(value):
            raise ValueError("%s:%d: NaN is not a valid value" % (path, lineno))
        if value < 0:
            raise ValueError("%s:%d: negative value %r" % (path, lineno, value))
        values.append(value)
    if len(values) == 0:
        raise ValueError("%s: no values found" % (path))
    return np.array(values, dtype=np.float64)


def uniform_list(text: str) -> List[float]:
    """argparse type for ``--u``: a single uniform, or a comma-separated list of them."""
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected a number or comma-separated numbers, got %r" % (text)) from None


def _fresh_seed() -> int:
    return int(np.random.SeedSequence().entropy % (2 ** 64))


def _resolve_uniforms(given: Optional[Sequence[float]], kind: str, K: int, source: UniformSource,
                      name: str):
    """Explicit uniforms if given, else draws from `source`. Returns ``(u, from_seed)``."""
    if kind == "none":
        if given is not None:
            raise ValueError("%s was given but the procedure does not use uniforms" % (name))
        return None, False
    if given is not None:
        if kind == "single" and len(given) != 1:
            raise ValueError("%s: expected a single uniform, got %d values" % (name, len(given)))
        if kind == "vector" and len(given) != K:
            raise ValueError("%s: expected %d uniforms (one per hypothesis), got %d" % (name, K, len(given)))
        return (float(given[0]) if kind == "single" else np.array(given, dtype=np.float64)), False
    if kind == "single":
        return source.uniform(), True
    return source.uniforms(K), True


def _to_json_value(u):
    if u is None:
        return None
    if isinstance(u, np.ndarray):
        return [float(x) for x in u]
    return float(u)


def _run_procedure(proc: Procedure, values, alpha, u, u_adapt, pvals) -> DiscoverySet:
    if proc is Procedure.EBH:
        return ebh(values, alpha).discoveries
    if proc is Procedure.R1_EBH:
        return r1_ebh(values, alpha, u).discoveries
    if proc is Procedure.R2_EBH:
        return r2_ebh(values, alpha, u).discoveries
    if proc is Procedure.RBOTH_EBH:
        return rboth_ebh(values, alpha, u, u_adapt).discoveries
    if proc is Procedure.U_EBH:
        return u_ebh(values, alpha, u).discoveries
    if proc is Procedure.J_EBH:
        return j_ebh(values, alpha, u).discoveries
    if proc is Procedure.PE_EBH:
        return pe_ebh(values, pvals, alpha).discoveries
    if proc is Procedure.BY_RATIO:
        return by_uniform_ratio(values, alpha, u).discoveries
    if proc is Procedure.BH:
        return bh(values, alpha)
    if proc is Procedure.BY:
        return by(values, alpha).discoveries
    return u_by(values, alpha, u).discoveries


def cmd_apply(args) -> Dict[str, Any]:
    proc: Procedure = args.procedure
    values = read_values(args.input)
    K = values.shape[0]
    pvals = None
    if proc is Procedure.PE_EBH:
        if args.pvals is None:
            raise ValueError("pe-ebh needs independent p-values, pass them with --pvals")
        pvals = read_values(args.pvals)
    elif args.pvals is not None:
        raise ValueError("--pvals is only used by pe-ebh")
    if proc is not Procedure.RBOTH_EBH and args.u_adapt is not None:
        raise ValueError("--u-adapt is only used by rboth-ebh")

    seed = args.seed
    needs_draws = ((proc.uniforms != "none" and args.u is None) or
                   (proc is Procedure.RBOTH_EBH and args.u_adapt is None))
    if needs_draws and seed is None:
        seed = _fresh_seed()
    source = UniformSource(seed if seed is not None else 0)
    u, u_from_seed = _resolve_uniforms(args.u, proc.uniforms, K, source.substream(0), "--u")
    u_adapt, adapt_from_seed = None, False
    if proc is Procedure.RBOTH_EBH:
        u_adapt, adapt_from_seed = _resolve_uniforms(args.u_adapt, "vector", K, source.substream(1), "--u-adapt")

    discoveries = _run_procedure(proc, values, args.alpha, u, u_adapt, pvals)
    offset = 1 if args.one_based else 0
    u_source = "none"
    if proc.uniforms != "none":
        u_source = "seed" if (u_from_seed or adapt_from_seed) else "explicit"

    manifest = RunManifest(command="apply", input_digest=file_digest(args.input), procedure=str(proc),
                           alpha=args.alpha, seed=seed if needs_draws else None, u_source=u_source,
                           u_draws=_to_json_value(u), u_adapt_draws=_to_json_value(u_adapt))
    return {
        "procedure": str(proc),
        "alpha": args.alpha,
        "K": K,
        "rejected": [int(i) + offset for i in discoveries.indices()],
        "one_based": bool(args.one_based),
        "k_star": discoveries.k_star,
        "threshold": discoveries.threshold,
        "u": _to_json_value(u),
        "u_adapt": _to_json_value(u_adapt),
        "manifest": manifest,
    }


def cmd_merge(args) -> Dict[str, Any]:
    method: MergeMethod = args.method
    values = read_values(args.input)
    if method is MergeMethod.HOMMEL and args.u is not None:
        raise ValueError("hommel is deterministic, --u is not used")

    seed = args.seed
    u = None
    from_seed = False
    if method is MergeMethod.U_HOMMEL:
        if args.u is None and seed is None:
            seed = _fresh_seed()
        given = None if args.u is None else [args.u]
        u, from_seed = _resolve_uniforms(given, "single", 1, UniformSource(seed or 0).substream(0), "--u")
    elif method is MergeMethod.GRID_HARMONIC and args.u is not None:
        u = args.u

    if method is MergeMethod.HOMMEL:
        merged = hommel_p(values)
    elif method is MergeMethod.U_HOMMEL:
        merged = u_hommel_p(values, u)
    else:
        dual = PMergingDual.grid_harmonic(values.shape[0])
        merged = merge_p(dual, values) if u is None else merge_p_randomized(dual, values, u)

    manifest = RunManifest(command="merge", input_digest=file_digest(args.input), procedure=str(method),
                           seed=seed if from_seed else None,
                           u_source="none" if u is None else ("seed" if from_seed else "explicit"),
                           u_draws=u)
    return {"method": str(method), "value": merged.value, "randomized": merged.randomized,
            "u": merged.u_used, "manifest": manifest}


def load_simulation_config(path: str):
    """Parse a ``simulate`` JSON file into a base config, the grid, the procedures and options."""
    with open(path, "r") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("%s: expected a JSON object" % (path))
    unknown = sorted(set(raw) - set(SIMULATE_KEYS))
    if unknown:
        raise ValueError("%s: unknown keys %s; valid keys are %s" % (path, unknown, sorted(SIMULATE_KEYS)))
    for key in ("mus", "rhos", "procedures"):
        if key not in raw:
            raise ValueError("%s: missing required key %r" % (path, key))
        if not isinstance(raw[key], list) or len(raw[key]) == 0:
            raise ValueError("%s: %r must be a non-empty list" % (path, key))

    opt = RebhOptions(u_mode=raw.get("u_mode", "independent"), full_scale=bool(raw.get("full_scale", False)),
                      num_workers=raw.get("num_workers"))
    config = SimulationConfig(
        K=raw.get("K", opt.default_num_hypotheses),
        pi0=float(raw.get("pi0", 0.3)),
        mu=float(raw["mus"][0]),
        rho=float(raw["rhos"][0]),
        dependence=raw.get("dependence", "toeplitz"),
        lam=raw.get("lam"),
        trials=raw.get("trials", opt.default_trials),
        alpha=float(raw.get("alpha", 0.05)),
        seed=raw.get("seed", 0),
    )
    if config.dependence == "custom":
        raise ValueError("%s: custom covariances are only available from the library" % (path))
    return config, raw["mus"], raw["rhos"], [str(p) for p in raw["procedures"]], opt


def cmd_simulate(args) -> pd.DataFrame:
    config, mus, rhos, procedures, opt = load_simulation_config(args.config)
    opt.debug = args.debug
    df = run_sweep(config, mus, rhos, procedures, opt)
    return df[SWEEP_COLUMNS]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rebh", description="Randomized multiple testing with e-values and p-values")
    p.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("apply", help="Apply a multiple-testing procedure to a file of values")
    a.add_argument('procedure', type=Procedure, choices=list(Procedure),
                   help="Procedure to run. bh, by and u-by read p-values, all others e-values")
    a.add_argument('input', type=str, help="One value per line, optionally preceded by a header")
    a.add_argument('--alpha', type=float, required=True, help="Target FDR level in (0, 1]")
    a.add_argument('--u', type=uniform_list, default=None,
                   help="Explicit uniforms: one for u-ebh/u-by, a comma-separated list with one per hypothesis "
                        "for r1/r2/rboth/j-ebh/by-ratio")
    a.add_argument('--u-adapt', type=uniform_list, default=None,
                   help="Second comma-separated list of uniforms for rboth-ebh")
    a.add_argument('--pvals', type=str, default=None,
                   help="File of p-values independent of the e-values (pe-ebh only)")
    a.add_argument('--seed', type=int, default=None,
                   help="Seed for uniforms not given explicitly. A fresh seed is drawn and reported if unset")
    a.add_argument('--one-based', action='store_true', help="Report 1-based indices")
    a.add_argument('--output', type=str, default=None, help="Write the JSON result here instead of stdout")
    a.add_argument('--manifest', type=str, default=None, help="Also write the run manifest to this file")

    m = sub.add_parser("merge", help="Merge p-values into one p-value for the global null")
    m.add_argument('method', type=MergeMethod, choices=list(MergeMethod))
    m.add_argument('input', type=str, help="One p-value per line, optionally preceded by a header")
    m.add_argument('--u', type=float, default=None,
                   help="Uniform for u-hommel; makes grid-harmonic merging randomized")
    m.add_argument('--seed', type=int, default=None, help="Seed for u-hommel when --u is not given")
    m.add_argument('--output', type=str, default=None)
    m.add_argument('--manifest', type=str, default=None)

    s = sub.add_parser("simulate", help="Run a Monte Carlo sweep and print a CSV grid",
                       formatter_class=argparse.RawDescriptionHelpFormatter,
                       epilog="config keys:\n" + "\n".join("  %-12s %s" % kv for kv in SIMULATE_KEYS.items()))
    s.add_argument('config', type=str, help="JSON file describing the sweep")
    s.add_argument('--output', type=str, default=None, help="Write the CSV here instead of stdout")
    s.add_argument('--debug', action='store_true', help="Print timings to stdout")
    return p


def _emit_json(result: Dict[str, Any], args) -> None:
    manifest: RunManifest = result["manifest"]
    if args.output is not None:
        manifest.outputs.append(args.output)
    if args.manifest is not None:
        manifest.outputs.append(args.manifest)
    result = dict(result, manifest=manifest.to_dict())
    text = json.dumps(result, indent=2) + "\n"
    if args.output is not None:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.manifest is not None:
        with open(args.manifest, "w") as fh:
            fh.write(json.dumps(result["manifest"], indent=2) + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "apply":
            _emit_json(cmd_apply(args), args)
        elif args.command == "merge":
            _emit_json(cmd_merge(args), args)
        else:
            df = cmd_simulate(args)
            if args.output is not None:
                df.to_csv(args.output, index=False, float_format=FLOAT_FORMAT)
            else:
                df.to_csv(sys.stdout, index=False, float_format=FLOAT_FORMAT)
    except (ValueError, TypeError, OSError) as e:
        print("error: %s" % (e), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
