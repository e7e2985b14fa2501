"""Command-line entry points.

Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _add_synth(sub):
    p = sub.add_parser("synth-decoders", help="synthesize stand-in decoder containers")
    p.add_argument("--kind", required=True, choices=["wing", "fuselage", "internals"])
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--smooth", action="store_true", default=False)
    p.add_argument("--rough", action="store_true", default=False)
    p.add_argument("--out", default=None)


def _add_train(sub):
    p = sub.add_parser("train-df", help="train the data-free coordinator")
    p.add_argument("--config", default=None, help="JSON run-config file")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch", type=int, default=None)
    p.add_argument("--zeta-dim", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="checkpoint.json")
    p.add_argument("--log", default=None)
    p.add_argument("--quiet", action="store_true")


def _add_optimize(sub):
    p = sub.add_parser("optimize", help="run a baseline latent-space optimizer")
    p.add_argument("--method", required=True, choices=["alm-gd", "igd-outer"])
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--case", default="case1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=5000)
    p.add_argument("--budget", type=int, default=200, help="outer proposals (igd-outer)")
    p.add_argument("--out", default=None, help="design-exchange output file")


def _add_evaluate(sub):
    p = sub.add_parser("evaluate", help="evaluate a trained coordinator")
    p.add_argument("--model", required=True, help="checkpoint file")
    p.add_argument("--case", default="case1")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--out", default=None, help="machine-readable report file")


def _add_sample(sub):
    p = sub.add_parser("sample", help="sample designs from a trained coordinator")
    p.add_argument("--model", required=True)
    p.add_argument("--case", default="case1")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)


def _add_export(sub):
    p = sub.add_parser("export-mesh", help="export a triangulated mesh for one zeta")
    p.add_argument("--model", required=True)
    p.add_argument("--case", default="case1")
    p.add_argument("--zeta", default=None, help="comma-separated values; default zeros")
    p.add_argument("--out", required=True)


def _add_serve(sub):
    p = sub.add_parser("serve", help="run the JSON HTTP service")
    p.add_argument("--model", required=True)
    p.add_argument("--port", type=int, default=int(os.environ.get("UAVGEN_PORT", "8787")))
    p.add_argument("--host", default="127.0.0.1")


def build_parser():
    parser = argparse.ArgumentParser(prog="uavgen")
    sub = parser.add_subparsers(dest="command", required=True)
    for add in (_add_synth, _add_train, _add_optimize, _add_evaluate, _add_sample,
                _add_export, _add_serve):
        add(sub)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK

    try:
        return _dispatch(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def _dispatch(args):
    if args.command == "synth-decoders":
        from .decoders import synthesize_standin

        smooth = not args.rough
        container = synthesize_standin(args.kind, seed=args.seed, smooth=smooth)
        out = args.out or f"{args.kind}_s{args.seed}_{'smooth' if smooth else 'rough'}.json"
        container.save(out)
        print(out)
        return EXIT_OK

    if args.command == "train-df":
        from .fileio import save_checkpoint, write_log
        from .training import TrainConfig, train

        if args.config:
            with open(args.config) as fh:
                config = TrainConfig.from_dict(json.load(fh))
        else:
            config = TrainConfig()
        for name in ("epochs", "batch", "seed"):
            value = getattr(args, name)
            if value is not None:
                setattr(config, name, value)
        if args.zeta_dim is not None:
            config.zeta_dim = args.zeta_dim

        def progress(rec):
            if not args.quiet and rec.epoch % 10 == 0:
                print(
                    f"epoch {rec.epoch}: loss {rec.loss:.4f} "
                    f"feasible {rec.feasible_fraction:.3f}"
                )

        result = train(config, progress=progress)
        save_checkpoint(args.out, result)
        if args.log:
            write_log(args.log, result.log)
        print(args.out)
        return EXIT_OK

    if args.command == "optimize":
        from . import zspace as zs
        from .aircraft import geometry_layer
        from .decoders import default_decoders
        from .fileio import save_designs
        from .optimizers import ALMGDConfig, OuterSearchConfig, alm_gd_optimize, outer_search

        decoders = default_decoders()
        if args.method == "alm-gd":
            rng = np.random.default_rng(args.seed)
            z0 = zs.sample_uniform(rng, args.seeds)
            record = alm_gd_optimize(
                z0, decoders, ALMGDConfig(case=args.case, max_steps=args.max_steps, seed=args.seed)
            )
            print(json.dumps(record.summary(), indent=1))
            if args.out:
                from . import tape as tp

                with tp.no_grad():
                    craft = zs.build_aircraft(
                        tp.Tensor(record.harvest_z), decoders, args.case
                    )
                    x_vals = zs.design_vector(craft).values
                summary = dict(record.summary())
                summary["trajectory"] = record.trajectory
                save_designs(
                    args.out, record.harvest_z, args.case,
                    metrics={
                        "objective": np.where(
                            record.harvested, record.harvest_objective, np.nan
                        ),
                        "feasible": record.harvested.astype(float),
                    },
                    meta=summary,
                    design_space=x_vals,
                )
        else:
            result = outer_search(
                OuterSearchConfig(case=args.case, budget=args.budget, seed=args.seed), decoders
            )
            printable = {k: v for k, v in result.items() if k not in ("best_z", "best_so_far")}
            print(json.dumps(printable, indent=1))
            if args.out and result["best_z"] is not None:
                save_designs(args.out, result["best_z"][None], args.case, meta=printable)
        return EXIT_OK

    if args.command == "evaluate":
        from .decoders import default_decoders
        from .evaluation import evaluate_model
        from .fileio import load_checkpoint

        net, config, _, _ = load_checkpoint(args.model)
        report = evaluate_model(
            net, default_decoders(smooth_fuselage=config.smooth_fuselage), args.case,
            seeds=args.seeds, samples_per_seed=args.samples,
        )
        print(report.table())
        if args.out:
            with open(args.out, "w") as fh:
                json.dump(report.to_dict(), fh, indent=1, sort_keys=True)
        return EXIT_OK

    if args.command == "sample":
        from . import tape as tp
        from . import zspace as zs
        from .aircraft import geometry_layer
        from .coordinator import sample_zeta_uniform
        from .decoders import default_decoders
        from .fileio import load_checkpoint, save_designs

        net, config, _, _ = load_checkpoint(args.model)
        decoders = default_decoders(smooth_fuselage=config.smooth_fuselage)
        rng = np.random.default_rng(args.seed)
        zeta = sample_zeta_uniform(rng, args.n, net.zeta_dim)
        with tp.no_grad():
            z, _ = net.forward(tp.Tensor(zeta))
            craft = zs.build_aircraft(tp.Tensor(z.values), decoders, args.case)
            report = geometry_layer(craft, args.case)
        from .evaluation import feasibility_check

        feasible, _ = feasibility_check(report)
        save_designs(
            args.out, z.values, args.case,
            metrics={
                "objective": report.column("O_mass").values,
                "feasible": feasible.astype(float),
            },
            design_space=zs.design_vector(craft).values,
        )
        print(args.out)
        return EXIT_OK

    if args.command == "export-mesh":
        from . import tape as tp
        from . import zspace as zs
        from .decoders import default_decoders
        from .fileio import load_checkpoint
        from .meshing import aircraft_mesh, save_mesh

        net, config, _, _ = load_checkpoint(args.model)
        decoders = default_decoders(smooth_fuselage=config.smooth_fuselage)
        zeta = (
            np.array([float(v) for v in args.zeta.split(",")])
            if args.zeta
            else np.zeros(net.zeta_dim)
        )
        if zeta.size != net.zeta_dim:
            raise ValueError(f"zeta needs {net.zeta_dim} values")
        with tp.no_grad():
            z, _ = net.forward(tp.Tensor(zeta[None]))
            craft = zs.build_aircraft(
                tp.Tensor(z.values), decoders, args.case, internals_cleanup=True
            )
        save_mesh(args.out, aircraft_mesh(craft, 0))
        print(args.out)
        return EXIT_OK

    if args.command == "serve":
        from .service import serve_checkpoint

        server = serve_checkpoint(args.model, port=args.port, host=args.host)
        print(f"serving on http://{args.host}:{server.server_address[1]}")
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
        return EXIT_OK

    raise ValueError(f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
