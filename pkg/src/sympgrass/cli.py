"""
Command-line front end.

    sympgrass classify FILE
    sympgrass flow (--input FILE | --type a,b,c --n N | --example-t T) --out DIR
    sympgrass sweep --n N (--type a,b,c ... | --k K) [--samples M] [--out FILE]
    sympgrass verify --suite NAME [--seed S]
    sympgrass sample --type a,b,c --n N --count M --out DIR

Settings come from the command line, then a JSON ``--config`` file, then the
defaults below.  Exit codes: 0 success, 1 verification failure, 2 usage or
validation error, 3 classification too close to a tolerance boundary,
4 a flow run did not converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .darboux import construct_subspace_of_type
from .energy_flow import FlowConfig, energy, energy_bounds, flow_run
from .errors import ClassificationUnstable, InconsistentSignature, SpectrumPairingFailure
from .oracles import worked_example_family
from .serialization import (
    SubspaceFormatError,
    read_subspace,
    write_json,
    write_reports,
    write_subspace,
    write_trajectory_csv,
)
from .suites import SUITES, run_suite, sample_seed
from .symplectic_core import (
    Tolerances,
    TypeSignature,
    check_signature,
    classify,
    is_J_compatible,
    kahler_spectrum,
    make_standard_space,
    signatures,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNSTABLE, EXIT_NOT_CONVERGED = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings for one CLI invocation."""

    n: int | None = None
    types: tuple[TypeSignature, ...] = ()
    k: int | None = None
    seed: int = 0
    steps: int = 100_000
    grad_tol: float = 1e-10
    step_size: float = 0.1
    record_every: int = 1
    samples: int = 5
    count: int = 1
    out: str | None = None
    input: str | None = None
    example_t: float | None = None
    suite: tuple[str, ...] = ()
    reorthonormalize: bool = False
    rank_tol: float = Tolerances.rank
    kahler_tol: float = Tolerances.kahler

    def flow_config(self) -> FlowConfig:
        return FlowConfig(step=self.step_size, grad_tol=self.grad_tol, max_steps=self.steps,
                          record_every=self.record_every)

    def tolerances(self) -> Tolerances:
        return Tolerances(rank=self.rank_tol, kahler=self.kahler_tol)

    def validate(self) -> "ExperimentConfig":
        if self.n is not None and self.n < 1:
            raise UsageError("--n must be at least 1")
        for sig in self.types:
            try:
                check_signature(sig, n=self.n)
            except (InconsistentSignature, ValueError) as exc:
                raise UsageError(str(exc)) from None
        if self.k is not None and (self.n is None or not 0 <= self.k <= 2 * self.n):
            raise UsageError("--k needs --n and 0 <= k <= 2n")
        for name in ("steps", "samples", "count", "record_every"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be positive")
        for name in ("grad_tol", "step_size", "rank_tol", "kahler_tol"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")
        return self


def _parse_type(text: str) -> TypeSignature:
    try:
        return TypeSignature.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _from_config_file(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a JSON object")
    known = {f.name for f in fields(ExperimentConfig)} | {"type"}
    unknown = set(doc) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "type" in doc:
        doc.setdefault("types", doc.pop("type"))
    if "types" in doc:
        raw = doc["types"]
        if isinstance(raw, str) or (raw and isinstance(raw[0], int)):
            raw = [raw]
        try:
            doc["types"] = tuple(
                TypeSignature.parse(t) if isinstance(t, str) else TypeSignature(*map(int, t))
                for t in raw
            )
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad type in config: {exc}") from None
    if "suite" in doc and isinstance(doc["suite"], str):
        doc["suite"] = (doc["suite"],)
    return doc


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults, overridden by the config file, overridden by explicit flags."""
    merged = {}
    if args.config:
        merged.update(_from_config_file(args.config))
    for f in fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None and v is not False and v != []:
            merged[f.name] = tuple(v) if isinstance(v, list) else v
    try:
        cfg = replace(ExperimentConfig(), **merged)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    return cfg.validate()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _out_stream(cfg: ExperimentConfig):
    return open(cfg.out, "w", newline="") if cfg.out else sys.stdout


def cmd_classify(cfg: ExperimentConfig) -> int:
    if not cfg.input:
        raise UsageError("classify needs an input file")
    W = read_subspace(cfg.input, cfg.reorthonormalize)
    tol = cfg.tolerances()
    sig = classify(W, tol)
    spec = kahler_spectrum(W, tol)
    comp = is_J_compatible(W, tol)
    lo, hi, strict = energy_bounds(sig)
    report = {
        "n": W.n,
        "k": W.k,
        "type": list(sig),
        "kahler_angles": list(spec.angles),
        "f": energy(W),
        "bounds": {"lower": lo, "upper": hi, "strict_upper": strict},
        "is_J_compatible": comp.compatible,
        "residual": comp.residual,
    }
    text = json.dumps(report, indent=2) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _flow_start(cfg: ExperimentConfig):
    given = [cfg.input is not None, bool(cfg.types), cfg.example_t is not None]
    if sum(given) != 1:
        raise UsageError("flow needs exactly one of --input, --type (with --n), --example-t")
    if cfg.input is not None:
        return read_subspace(cfg.input, cfg.reorthonormalize)
    if cfg.example_t is not None:
        return worked_example_family(cfg.example_t)
    if cfg.n is None or len(cfg.types) != 1:
        raise UsageError("flow from a type needs --n and a single --type")
    return construct_subspace_of_type(make_standard_space(cfg.n), cfg.types[0],
                                      mode="randomized", seed=sample_seed(cfg.seed, 0))


def cmd_flow(cfg: ExperimentConfig) -> int:
    W0 = _flow_start(cfg)
    traj = flow_run(W0, cfg.flow_config(), cfg.tolerances())
    out = Path(cfg.out or "flow_out")
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(out / "trajectory.csv", traj)
    last = traj.samples[-1]
    summary = {
        "converged": traj.converged,
        "steps": traj.steps,
        "f_limit": traj.f_limit,
        "type": list(last.signature),
        "limit_residual": last.residual,
        "rejected_steps": traj.rejected,
        "stop_reason": traj.reason,
        "start_type": list(traj.samples[0].signature),
        "seed": cfg.seed,
    }
    write_json(out / "summary.json", summary)
    write_subspace(out / "limit.json", traj.limit)
    print(json.dumps(summary))
    return EXIT_OK if traj.converged else EXIT_NOT_CONVERGED


SWEEP_COLUMNS = ("n0", "nplus", "nminus", "sample", "converged", "steps", "f_limit",
                 "limit_n0", "limit_nplus", "limit_nminus", "limit_residual", "pass")


def cmd_sweep(cfg: ExperimentConfig) -> int:
    if cfg.n is None:
        raise UsageError("sweep needs --n")
    sigs = list(cfg.types)
    if cfg.k is not None:
        sigs += [s for s in signatures(cfg.n, cfg.k) if s not in sigs]
    if not sigs:
        raise UsageError("sweep needs at least one signature (--type or --k)")
    sp = make_standard_space(cfg.n)
    fcfg, tol = cfg.flow_config(), cfg.tolerances()
    rows, verdicts = [], []
    any_unconverged = any_wrong = False
    for si, sig in enumerate(sigs):
        ok_count = 0
        for j in range(cfg.samples):
            W0 = construct_subspace_of_type(sp, sig, mode="randomized",
                                            seed=sample_seed(cfg.seed, si * cfg.samples + j))
            tr = flow_run(W0, fcfg, tol)
            lim = tr.samples[-1]
            ok = (tr.converged and lim.signature == sig and abs(tr.f_limit - sig.n0) < 1e-6
                  and lim.residual < 1e-6 and not tr.invariant_violations())
            any_unconverged |= not tr.converged
            any_wrong |= tr.converged and not ok
            ok_count += ok
            rows.append([*sig, j, int(tr.converged), tr.steps, format(tr.f_limit, ".17g"),
                         *lim.signature, format(lim.residual, ".17g"), int(ok)])
        verdicts.append({"type": list(sig), "samples": cfg.samples, "passed": ok_count,
                         "pass": ok_count == cfg.samples})
    fh = _out_stream(cfg)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        w.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    for v in verdicts:
        sys.stderr.write(json.dumps(v) + "\n")
    if any_wrong:
        return EXIT_FAIL
    return EXIT_NOT_CONVERGED if any_unconverged else EXIT_OK


def cmd_verify(cfg: ExperimentConfig) -> int:
    names = list(cfg.suite) or ["example"]
    if names == ["all"]:
        names = list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite {unknown[0]!r}; choose from {', '.join(SUITES)} or all")
    reports = [r for name in names for r in run_suite(name, cfg.seed)]
    fh = _out_stream(cfg)
    try:
        write_reports(fh, reports)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_sample(cfg: ExperimentConfig) -> int:
    if cfg.n is None or len(cfg.types) != 1:
        raise UsageError("sample needs --n and a single --type")
    sig = cfg.types[0]
    sp = make_standard_space(cfg.n)
    out = Path(cfg.out or "samples")
    out.mkdir(parents=True, exist_ok=True)
    width = max(3, len(str(cfg.count - 1)))
    for i in range(cfg.count):
        W = construct_subspace_of_type(sp, sig, mode="randomized", seed=sample_seed(cfg.seed, i))
        got = classify(W, cfg.tolerances())
        if got != sig:
            sys.stderr.write(f"sample {i} classified as {got}, expected {sig}\n")
            return EXIT_FAIL
        path = out / f"sample_{i:0{width}d}.json"
        write_subspace(path, W)
        print(path)
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "flow": cmd_flow,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "sample": cmd_sample,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with default settings")
    common.add_argument("--seed", type=int, help="master seed (default 0)")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--rank-tol", dest="rank_tol", type=float)
    common.add_argument("--kahler-tol", dest="kahler_tol", type=float)

    flowopts = _Parser(add_help=False)
    flowopts.add_argument("--steps", type=int, help="maximum number of attempted steps")
    flowopts.add_argument("--grad-tol", dest="grad_tol", type=float)
    flowopts.add_argument("--step-size", dest="step_size", type=float, help="initial step")
    flowopts.add_argument("--record-every", dest="record_every", type=int)

    p = _Parser(prog="sympgrass", description="Subspaces of a symplectic vector space: "
                "classification, energy gradient flow and verification suites.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", parents=[common], help="type, Kahler angles and energy of a subspace")
    c.add_argument("input", help="subspace JSON file")
    c.add_argument("--reorthonormalize", action="store_true")

    f = sub.add_parser("flow", parents=[common, flowopts], help="run the gradient flow")
    f.add_argument("--input", help="start from a subspace JSON file")
    f.add_argument("--n", type=int)
    f.add_argument("--type", dest="types", type=_parse_type, action="append")
    f.add_argument("--example-t", dest="example_t", type=float,
                   help="start from g(t) span{e1, f1} in R^4")
    f.add_argument("--reorthonormalize", action="store_true")

    s = sub.add_parser("sweep", parents=[common, flowopts], help="flow random starts of several types")
    s.add_argument("--n", type=int)
    s.add_argument("--type", dest="types", type=_parse_type, action="append")
    s.add_argument("--k", type=int, help="add every type of this dimension")
    s.add_argument("--samples", type=int, help="starts per type (default 5)")

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", action="append", help=f"one of {', '.join(SUITES)}, or all")

    m = sub.add_parser("sample", parents=[common], help="write random subspaces of a type")
    m.add_argument("--n", type=int)
    m.add_argument("--type", dest="types", type=_parse_type, action="append")
    m.add_argument("--count", type=int)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        sys.stderr.write(f"sympgrass: error: {exc}\n")
        return EXIT_USAGE
    except SubspaceFormatError as exc:
        sys.stderr.write(f"sympgrass: invalid subspace: {exc}\n")
        return EXIT_USAGE
    except (ClassificationUnstable, SpectrumPairingFailure) as exc:
        sys.stderr.write(f"sympgrass: numerically unstable: {exc}\n")
        return EXIT_UNSTABLE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
