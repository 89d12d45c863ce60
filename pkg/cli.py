"""Command-line front end and experiment harness.

Subcommands: construct, trial, verify, distances, runs.
Exit codes: 0 success, 1 property or hash check failed, 2 bad configuration
or broken precondition, 3 enumeration cap exceeded.
"""

import argparse
import dataclasses
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from artifacts import build_trial_artifacts
from audit_log import log_event
from bitcore import BitVec
from channel import AdversaryContext, adversary, corrupt, run_tests, sample_defectives
from config import ADVERSARY_CAP, COMPATIBLE_DECODERS, ExperimentConfig, load_config_file, merge_config
from constructions import TestingScheme, build_scheme, load_scheme, save_scheme, scheme_metadata
from db import get_db, init_db
from decoders import decode
from distances import adel_at_least, adel_distance, check_coverage, deletion_distance, lcs
from errors import ConfigError, ContractViolation, InfeasibleEnumeration
from manifest import build_hashes_txt
from run_vault import list_runs, save_run
from verify import PROPERTIES, check_property

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_CAP = 0, 1, 2, 3


@dataclass(frozen=True)
class ExperimentRecord:
    construction: str
    n: int
    m: int
    k: int
    delta: int
    trial: int
    seed: int
    adversary: str
    decoder: str
    success: bool
    time_us: int
    truth: tuple[int, ...] = ()
    deleted: tuple[int, ...] = ()
    recovered: tuple[int, ...] = ()
    status: str = ""
    diagnostics: dict = field(default_factory=dict)

    def to_row(self) -> dict:
        return {
            "construction": self.construction, "n": self.n, "m": self.m, "k": self.k,
            "delta": self.delta, "trial": self.trial, "seed": self.seed,
            "adversary": self.adversary, "decoder": self.decoder,
            "success": int(self.success), "time_us": self.time_us,
        }


# -----------------------------
# Config / scheme plumbing
# -----------------------------

_FLAG_FIELDS = [f.name for f in dataclasses.fields(ExperimentConfig)]


def resolve_config(args, scheme: TestingScheme | None = None) -> ExperimentConfig:
    file_values = load_config_file(args.config) if getattr(args, "config", None) else {}
    flags = {name: getattr(args, name, None) for name in _FLAG_FIELDS}
    if scheme is not None:
        flags["construction"] = scheme.kind.value
        flags["n"], flags["k"], flags["delta"] = scheme.n, scheme.k, scheme.delta
        if args.k is not None:
            flags["k"] = args.k
        if args.delta is not None:
            flags["delta"] = args.delta
    return merge_config(file_values, flags)


def scheme_for(args) -> tuple[TestingScheme, ExperimentConfig]:
    scheme_path = args.scheme
    if scheme_path is None and getattr(args, "config", None):
        scheme_path = load_config_file(args.config).get("scheme")
    if scheme_path:
        scheme = load_scheme(scheme_path)
        return scheme, resolve_config(args, scheme)
    cfg = resolve_config(args)
    return build_scheme(cfg), cfg


def _open_vault(args, command: str, target: str):
    if not getattr(args, "vault", None):
        return None
    con = init_db(get_db(args.vault))
    log_event(con, command, target)
    return con


def _print_kv(items):
    for key, value in items:
        print(f"{key} = {value}")


# -----------------------------
# Subcommands
# -----------------------------

def cmd_construct(args) -> int:
    cfg = resolve_config(args)
    if not cfg.out:
        raise ConfigError("construct needs --out PATH for the matrix file")
    scheme = build_scheme(cfg)
    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    files = save_scheme(scheme, out)
    hashes = build_hashes_txt(files)
    out.with_name(out.name + ".sha256").write_bytes(hashes)

    _print_kv(scheme_metadata(scheme).items())
    _print_kv([("matrix", out)])

    con = _open_vault(args, "construct", str(out))
    if con is not None:
        save_run(con, "construct", dataclasses.asdict(cfg), {**files, "hashes.sha256.txt": hashes})
        con.close()
    return EXIT_OK


def run_trials(scheme: TestingScheme, cfg: ExperimentConfig) -> list[ExperimentRecord]:
    if cfg.decoder not in COMPATIBLE_DECODERS[scheme.kind.value]:
        raise ConfigError(f"decoder {cfg.decoder!r} cannot decode a {scheme.kind.value} scheme")

    def run_decoder(received: BitVec):
        return decode(scheme, received, cfg.decoder, cfg.delta, cfg.cap, cfg.prefix)

    records = []
    for trial in range(cfg.trials):
        seed = cfg.seed + trial
        rng = np.random.default_rng(seed)
        truth = sample_defectives(scheme.n, scheme.k, rng)
        y = run_tests(scheme, truth)

        context = AdversaryContext(run_decoder, truth) if cfg.adversary == "exhaustive" else None
        trace = adversary(cfg.adversary, y, cfg.delta, context,
                          seed=int(rng.integers(0, 2**32)), cap=min(cfg.cap, ADVERSARY_CAP))
        received = corrupt(y, trace)

        result = run_decoder(received)
        diagnostics = dict(result.diagnostics)
        if not cfg.record_timing:
            diagnostics["runtime_us"] = 0

        records.append(ExperimentRecord(
            construction=scheme.kind.value, n=scheme.n, m=scheme.m, k=scheme.k, delta=cfg.delta,
            trial=trial, seed=seed, adversary=cfg.adversary, decoder=cfg.decoder,
            success=result.matches(truth), time_us=diagnostics["runtime_us"],
            truth=truth.indices, deleted=trace.deleted, recovered=result.recovered.indices,
            status=result.status.value, diagnostics=diagnostics,
        ))
        log.debug("trial %d: %s", trial, result.to_line())
    return records


def cmd_trial(args) -> int:
    scheme, cfg = scheme_for(args)
    records = run_trials(scheme, cfg)
    artifacts = build_trial_artifacts(dataclasses.asdict(cfg), records)

    if cfg.out:
        out = Path(cfg.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(artifacts["trials.csv"])
        out.with_name(out.name + ".summary.json").write_bytes(artifacts["summary.json"])
    else:
        sys.stdout.write(artifacts["trials.csv"].decode("utf-8"))

    con = _open_vault(args, "trial", cfg.out or "-")
    if con is not None:
        save_run(con, "trial", dataclasses.asdict(cfg), artifacts)
        con.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    scheme, cfg = scheme_for(args)
    report = check_property(args.property, scheme.matrix, cfg.k, cfg.delta, cfg.cap)
    for line in report.to_lines():
        print(line)
    con = _open_vault(args, "verify", f"{args.property} k={cfg.k} delta={cfg.delta}")
    if con is not None:
        save_run(con, "verify", dataclasses.asdict(cfg),
                 {"report.txt": ("\n".join(report.to_lines()) + "\n").encode("utf-8")})
        con.close()
    return EXIT_OK if report.holds else EXIT_FAILED


def _read_vector(arg: str) -> BitVec:
    path = Path(arg)
    if path.is_file():
        return BitVec.from_string(path.read_text(encoding="utf-8"))
    return BitVec.from_string(arg)


def cmd_distances(args) -> int:
    x, y = _read_vector(args.x), _read_vector(args.y)
    items = [("len_x", len(x)), ("len_y", len(y)), ("lcs", lcs(x, y))]
    if len(x) == len(y):
        d = adel_distance(x, y)
        items += [("deletion_distance", deletion_distance(x, y)),
                  ("adel_distance", "none" if d is None else d)]
        if args.delta is not None:
            items.append(("adel_at_least", str(adel_at_least(x, y, args.delta)).lower()))
    if args.t is not None:
        if len(y) < len(x):
            raise ContractViolation("check_coverage needs len(y) >= len(x)")
        items.append(("check_coverage", str(check_coverage(x, y, args.t)).lower()))
    _print_kv(items)
    return EXIT_OK


def cmd_runs(args) -> int:
    if not args.vault:
        raise ConfigError("runs needs --vault PATH")
    con = init_db(get_db(args.vault))
    ok = True
    for run in list_runs(con):
        print(f"run {run['id']} {run['command']} {run['created_at']}")
        for name, verified in run["artifacts"].items():
            ok &= verified
            print(f"  {name}: {'hash verified' if verified else 'hash mismatch'}")
    con.close()
    return EXIT_OK if ok else EXIT_FAILED


# -----------------------------
# Parser
# -----------------------------

def _experiment_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="flat key = value config file; flags override it")
    p.add_argument("--construction", choices=list(COMPATIBLE_DECODERS))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--scale-c", dest="scale_c", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--base-matrix", dest="base_matrix", help="k-disjunct base for the repetition scheme")
    p.add_argument("--rs-p", dest="rs_p", type=int)
    p.add_argument("--rs-n", dest="rs_n", type=int)
    p.add_argument("--rs-k", dest="rs_k", type=int)
    p.add_argument("--target-p", dest="target_p", type=int)
    p.add_argument("--inner", choices=["repetition", "subsequence"])
    p.add_argument("--pre-distance", dest="pre_distance", type=int)
    p.add_argument("--prefix", choices=["proof", "half"])
    p.add_argument("--decoder")
    p.add_argument("--adversary")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--cap", type=int)
    p.add_argument("--scheme", help="load a constructed scheme instead of building one")
    p.add_argument("--no-timing", dest="record_timing", action="store_const", const=False,
                   help="write time_us = 0 so repeated runs are byte-identical")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--vault", help="sqlite file recording runs and artifacts")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="group-testing",
                                     description="Group testing under adversarial deletions")
    sub = parser.add_subparsers(dest="cmd", required=True)
    experiment = _experiment_flags()

    p = sub.add_parser("construct", parents=[common, experiment], help="build a testing scheme")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("trial", parents=[common, experiment], help="run corruption/decode trials")
    p.set_defaults(func=cmd_trial)

    p = sub.add_parser("verify", parents=[common, experiment], help="certify a matrix property")
    p.add_argument("--property", required=True, choices=PROPERTIES)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("distances", parents=[common], help="lcs / deletion distances of two vectors")
    p.add_argument("x", help="0/1 string or a file holding one")
    p.add_argument("y", help="0/1 string or a file holding one")
    p.add_argument("--delta", type=int)
    p.add_argument("--t", type=int, help="coverage budget for check_coverage(x, y, t)")
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("runs", parents=[common], help="list stored runs and re-verify their hashes")
    p.set_defaults(func=cmd_runs)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except InfeasibleEnumeration as e:
        log.error("%s", e)
        return EXIT_CAP
    except (ConfigError, ContractViolation, OSError) as e:
        log.error("%s", e)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
