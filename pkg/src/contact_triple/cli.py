"""Command line interface: ``contact-triple run | verify | legendre | list-scenarios``.

Exit status: 0 on success, 1 for configuration errors or failed checks,
2 for numerical failures (singular Hessians, Newton or step-size breakdown).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import config as C
from . import legendre as L
from .errors import ConfigError, ContactTripleError, DomainError, NumericalError
from .integrate import integrate_section
from .scenarios import builtin_scenarios
from .verify import SUITES, verify

EXIT_OK, EXIT_FAIL, EXIT_NUMERIC = 0, 1, 2


def _cmd_run(args):
    cfg = C.load_config(args.config)
    fmt = args.format or cfg.output.format
    out = args.out or cfg.output.path or str(Path(args.config).with_suffix(f".{fmt}").name)
    section = cfg.build_section()
    ic = cfg.integrator
    traj = integrate_section(section, cfg.chart, cfg.state, cfg.duration, ic.method, ic.step, ic.abs_tol, ic.rel_tol)
    if fmt == "json":
        written = [traj.write_json(out)]
    else:
        written = list(traj.write_csv(out))
    s, chart, y = traj.final
    print(f"{cfg.side} trajectory: {len(traj)} samples, {len(traj.events)} chart switches")
    print(f"final s={s:.17g} chart={chart} state={[float(v) for v in y]}")
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


def _cmd_verify(args):
    report = verify(args.suite, flip_mu_sign=args.flip_mu_sign)
    print(report.render())
    return EXIT_OK if report.passed else EXIT_FAIL


def _write_table(path, section, transform, region, points):
    n = section.dim
    k = points
    axes = [np.linspace(a, b, k) for a, b in zip(region.lower, region.upper)]
    mesh = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=1)
    src = "x xd t" if section.kind == "lagrangian" else "x p z"
    dst = "x p z" if section.kind == "lagrangian" else "x xd t"

    def names(spec):
        x, f, last = spec.split()
        return [f"{x}{i}" for i in range(1, n + 1)] + [f"{f}{i}" for i in range(1, n + 1)] + [last]

    header = ["chart"] + names(src) + ["image_" + c for c in names(dst)[n:]] + ["source_value", "transform_value"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for pt in mesh:
            jt = section.jet(region.chart, pt)
            image = np.concatenate([pt[:n], jt.grad[n:]])
            w.writerow(
                [region.chart]
                + [format(v, ".17g") for v in pt]
                + [format(v, ".17g") for v in image[n:]]
                + [format(jt.value, ".17g"), format(transform.value(region.chart, image), ".17g")]
            )


def _cmd_legendre(args):
    cfg = C.load_legendre_config(args.config)
    section = cfg.build_section()
    diag = L.hyperregularity_probe(section, cfg.region, cfg.samples)
    print(
        json.dumps(
            {
                "section": section.name,
                "side": section.kind,
                "sampled_condition_max": diag.sampled_condition_max,
                "injectivity_violations": diag.injectivity_violations,
                "samples": diag.samples,
                "verdict": diag.verdict,
            },
            indent=1,
        )
    )
    if not diag.hyperregular:
        return EXIT_FAIL
    if cfg.table_path:
        if section.kind == "lagrangian":
            transform = L.hamiltonian_from_lagrangian(section, cfg.region, cfg.samples)
        else:
            transform = L.lagrangian_from_hamiltonian(section, cfg.region, cfg.samples)
        region = cfg.region or L.default_regions(section)[0]
        _write_table(cfg.table_path, section, transform, region, cfg.table_points)
        print(f"wrote {cfg.table_path}")
    return EXIT_OK


def _cmd_list(args):
    for sc in builtin_scenarios():
        params = ", ".join(f"{k}={v:g}" for k, v in sc.params.items()) or "-"
        init = ", ".join(f"{k}={v}" for k, v in sc.initial.items())
        print(f"{sc.name:<22s} {sc.side:<12s} {sc.description}")
        print(f"{'':<22s} params: {params}; bundle: {sc.bundle['kind']}; initial: {init}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="contact-triple", description="Contact Hamiltonian and Lagrangian mechanics on line bundles."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="integrate a scenario configuration")
    run.add_argument("--config", required=True, help="JSON scenario file")
    run.add_argument("--out", help="output path (overrides output.path)")
    run.add_argument("--format", choices=("csv", "json"), help="output format (overrides output.format)")
    run.set_defaults(func=_cmd_run)

    ver = sub.add_parser("verify", help="run invariant suites")
    ver.add_argument("suite", nargs="?", default="all", choices=("all",) + SUITES)
    ver.add_argument("--flip-mu-sign", action="store_true", help="use the rejected sign in alpha0 (should fail)")
    ver.set_defaults(func=_cmd_verify)

    leg = sub.add_parser("legendre", help="hyperregularity diagnostics and transform table")
    leg.add_argument("--config", required=True, help="JSON section/region file")
    leg.set_defaults(func=_cmd_legendre)

    ls = sub.add_parser("list-scenarios", help="list the built-in scenarios")
    ls.set_defaults(func=_cmd_list)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (NumericalError, DomainError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ContactTripleError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
