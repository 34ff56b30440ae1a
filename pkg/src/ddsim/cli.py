"""Command-line client for the simulator service.

The CLI parses arguments and moves files; all computation happens behind the
HTTP API. By default requests run against an in-process instance of the
service (no server needed); ``--server URL`` targets a running deployment
instead. ``DDSIM_OUT_DIR`` sets the default output directory.

Exit codes: 0 success, 1 input or schema problems (schema diagnostics carry
a JSON-pointer location), 2 usage errors.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys

import httpx

DEFAULT_OUT_ENV = "DDSIM_OUT_DIR"


class CliError(Exception):
    """Fatal CLI problem; message goes to stderr, exit code 1."""


class InProcessClient:
    """Runs requests against an in-process service instance.

    The ASGI transport is async-only, so each request spins up a short-lived
    event loop; with one or two requests per CLI invocation that is cheap and
    avoids requiring a running server.
    """

    def __init__(self):
        from .service import create_app

        self._app = create_app()

    def post(self, path: str, json: dict) -> httpx.Response:
        payload = json

        async def go():
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://ddsim.local", timeout=None
            ) as client:
                return await client.post(path, json=payload)

        return asyncio.run(go())

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def service_client(server: str | None = None):
    """HTTP client for a remote service, or an in-process one when no URL
    is given."""
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=600.0)
    return InProcessClient()


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    if response.status_code == 422:
        detail = response.json().get("detail", [])
        lines = []
        for item in detail if isinstance(detail, list) else [detail]:
            loc = item.get("loc", "")
            if isinstance(loc, (list, tuple)):
                loc = "/" + "/".join(str(p) for p in loc if p != "body")
            lines.append(f"{loc}: {item.get('msg', item)}")
        raise CliError("invalid input\n" + "\n".join(lines))
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise CliError(str(detail))
    return response.json()


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None


def _write(path: str, text: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def _out_dir(requested: str | None, default_name: str) -> str:
    if requested:
        return requested
    base = os.environ.get(DEFAULT_OUT_ENV, ".")
    return os.path.join(base, default_name)


def _load_json(path: str) -> dict:
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}") from None


# --------------------------------------------------------------------------
# Subcommand handlers
# --------------------------------------------------------------------------

def cmd_simulate(args, client) -> int:
    spec = _load_json(args.config)
    payload = {"spec": spec}
    if args.seed is not None:
        payload["seed"] = args.seed
    out = _post(client, "/simulate", payload)
    run_dir = _out_dir(args.out, "ddsim-run")
    os.makedirs(run_dir, exist_ok=True)
    _write(os.path.join(run_dir, "records.csv"), out["records_csv"])
    manifest = dict(out["manifest"])
    manifest["record_count"] = out["record_count"]
    _write(
        os.path.join(run_dir, "manifest.json"),
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
    )
    print(f"wrote {out['record_count']} records to {run_dir}")
    return 0


def _fit_payload(args) -> dict:
    if args.curve:
        return {"curve_csv": _read(args.curve), "variant": args.variant}
    if args.results and args.sequence:
        return {
            "records_csv": _read(os.path.join(args.results, "records.csv")),
            "label": args.sequence,
            "tau": args.tau,
            "variant": args.variant,
            "seed": args.seed,
        }
    raise CliError("provide --curve, or --results with --sequence")


def cmd_fit(args, client) -> int:
    out = _post(client, "/fit", _fit_payload(args))
    fit = out["fit"]
    text = json.dumps(fit, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write(args.out, text)
    elif args.results:
        tag = f"{args.sequence}_tau{args.tau}".replace("@", "_").replace(":", "_")
        _write(os.path.join(args.results, f"fit_{tag}.json"), text)
    lam = fit["lambda"]
    alpha = fit["alpha"]
    print(
        f"lambda={lam if lam is not None else 'inf'} "
        f"alpha={alpha if alpha is not None else 'inf'} gamma={fit['gamma']} "
        f"residual_rms={fit['residual_rms']:.3e}"
    )
    return 0


def cmd_intersect(args, client) -> int:
    if args.fit_free and args.fit_dd:
        fit_free = _load_json(args.fit_free)
        fit_dd = _load_json(args.fit_dd)
    elif args.results:
        records_csv = _read(os.path.join(args.results, "records.csv"))
        fit_free = _post(
            client, "/fit",
            {"records_csv": records_csv, "label": args.free, "tau": args.tau,
             "variant": args.variant, "seed": args.seed},
        )["fit"]
        fit_dd = _post(
            client, "/fit",
            {"records_csv": records_csv, "label": args.dd, "tau": args.tau,
             "variant": args.variant, "seed": args.seed},
        )["fit"]
    else:
        raise CliError("provide --fit-free/--fit-dd files or a --results directory")
    out = _post(
        client, "/intersect",
        {"fit_free": fit_free, "fit_dd": fit_dd,
         "resamples": args.resamples, "seed": args.seed},
    )["result"]
    if args.out:
        _write(args.out, json.dumps(out, indent=2, sort_keys=True) + "\n")
    if out["found"]:
        print(f"t_int = {out['t_int']:.2f} +- {out['t_int_2sigma']:.2f} (2 sigma)")
    else:
        print(f"no intersection: {out['diagnostic']}")
    return 0


def cmd_bound(args, client) -> int:
    from .noise import NoiseConfiguration
    from .results import read_result_dir
    from .sequences import get_profile

    if args.grid:
        rows = []
        for line in _read(args.grid).splitlines()[1:]:
            tau_ns, n, f = line.split(",")
            rows.append({"tau_ns": float(tau_ns), "n_pulses": int(n), "fidelity": float(f)})
        if args.constant is None:
            raise CliError("--grid input needs --constant")
        payload = {"grid": rows, "bound_constant": args.constant}
    else:
        if not args.results:
            raise CliError("provide --results or --grid")
        result = read_result_dir(args.results)
        spec = result.manifest.get("spec", {})
        profile = get_profile(spec.get("profile", "IBMQX5"))
        slot = profile.identity_slot_ns
        rows = [
            {"tau_ns": r.tau * slot, "n_pulses": r.n_pulses, "fidelity": r.uhlmann_vs_free}
            for r in result.records
            if r.uhlmann_vs_free is not None
        ]
        if not rows:
            raise CliError("no decoupled-vs-free fidelities in this result set "
                           "(run a PULSE_INTERVAL_SWEEP)")
        payload = {"grid": rows}
        if args.constant is not None:
            payload["bound_constant"] = args.constant
        else:
            noise = NoiseConfiguration.from_dict(spec.get("noise", {}))
            if noise.spin_bath is None:
                raise CliError("manifest has no spin bath; pass --constant")
            payload["bath"] = noise.spin_bath.to_dict()
    analysis = _post(client, "/bound", payload)["analysis"]
    text = json.dumps(analysis, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write(args.out, text)
    elif args.results:
        _write(os.path.join(args.results, "bound_analysis.json"), text)
    status = "holds" if analysis["satisfied"] else f"violated at {len(analysis['violations'])} points"
    slopes = ", ".join(f"N={r['n_pulses']}: a={r['a']:.2f}" for r in analysis["rows"])
    print(f"bound {status}; slopes {slopes}")
    return 0


def cmd_bootstrap(args, client) -> int:
    if args.values_file:
        samples = [float(v) for v in _read(args.values_file).split()]
    elif args.results and args.sequence:
        from .results import aggregate_samples, read_result_dir

        result = read_result_dir(args.results)
        groups = aggregate_samples(result.records)
        key = (args.sequence, args.n, args.tau)
        if key not in groups:
            raise CliError(f"no samples for {key} in {args.results}")
        samples = groups[key]
    else:
        raise CliError("provide --values-file, or --results with --sequence and --n")
    out = _post(
        client, "/bootstrap",
        {"samples": samples, "resamples": args.resamples, "seed": args.seed},
    )
    print(
        f"mean={out['mean']:.6f} ci95=[{out['ci_low']:.6f}, {out['ci_high']:.6f}] "
        f"halfwidth={out['ci_halfwidth']:.6f} ({len(samples)} samples)"
    )
    return 0


def cmd_verify_dd(args, client) -> int:
    out = _post(
        client, "/verify-dd",
        {"family": args.sequence, "repetitions": args.repetitions,
         "coupling": args.coupling, "trials": args.trials, "seed": args.seed,
         "bath_qubits": args.bath_qubits},
    )
    print(
        f"{out['sequence']} x{out['repetitions']} ({out['n_labels']} labels), "
        f"coupling={out['coupling']}, trials={out['trials']}"
    )
    print(f"max first-order norm: {out['max_norm']:.3e}")
    print(f"max relative to ||H_SB||: {out['max_relative']:.3e}")
    suppressed = out["max_relative"] < 1e-12
    print("first-order cancellation: " + ("yes" if suppressed else "no"))
    return 0


def cmd_export_qasm(args, client) -> int:
    payload = {
        "family": args.sequence,
        "n_pulses": args.n,
        "tau_multiplier": args.tau,
    }
    if args.bell:
        payload["bell"] = args.bell
    else:
        payload["theta"] = args.theta if args.theta is not None else 0.0
        payload["phi"] = args.phi
        payload["lam"] = args.lam
    out = _post(client, "/export-qasm", payload)
    if args.out:
        _write(args.out, out["qasm"])
    else:
        sys.stdout.write(out["qasm"])
    return 0


def cmd_report(args, client) -> int:
    records_csv = _read(os.path.join(args.results, "records.csv"))
    out = _post(
        client, "/report",
        {"records_csv": records_csv, "resamples": args.resamples, "seed": args.seed},
    )
    target = args.out or os.path.join(args.results, "report.csv")
    _write(target, out["report_csv"])
    rows = max(out["report_csv"].count("\n") - 1, 0)
    print(f"wrote {rows} aggregate rows to {target}")
    return 0


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddsim",
        description="Simulate decoupling experiments and run the analysis pipeline.",
    )
    parser.add_argument("--server", help="base URL of a running service "
                        "(default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run an experiment spec and store results")
    p.add_argument("--config", required=True, help="experiment spec JSON")
    p.add_argument("--seed", type=int, help="override the config's master seed")
    p.add_argument("--out", help="output run directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit the decay model to a fidelity curve")
    p.add_argument("--curve", help="curve CSV (n_pulses,fidelity[,ci_halfwidth])")
    p.add_argument("--results", help="run directory to aggregate and fit")
    p.add_argument("--sequence", help="aggregate label to fit (e.g. XY4)")
    p.add_argument("--tau", type=int, default=1)
    p.add_argument("--variant", default="SELF_CONSISTENT",
                   choices=["SELF_CONSISTENT", "AS_WRITTEN"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the fit JSON here")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("intersect", help="crossing time of two fitted curves")
    p.add_argument("--results", help="run directory (fits both labels)")
    p.add_argument("--free", default="FREE")
    p.add_argument("--dd", default="XY4")
    p.add_argument("--tau", type=int, default=1)
    p.add_argument("--fit-free", help="fit JSON for the baseline curve")
    p.add_argument("--fit-dd", help="fit JSON for the decoupled curve")
    p.add_argument("--variant", default="SELF_CONSISTENT",
                   choices=["SELF_CONSISTENT", "AS_WRITTEN"])
    p.add_argument("--resamples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("bound", help="infidelity scaling and hard bound check")
    p.add_argument("--results", help="run directory from a PULSE_INTERVAL_SWEEP")
    p.add_argument("--grid", help="CSV tau_ns,n_pulses,fidelity (alternative input)")
    p.add_argument("--constant", type=float, help="override the bound constant")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("bootstrap", help="bootstrap mean and 95%% CI of samples")
    p.add_argument("--values-file", help="whitespace-separated numbers")
    p.add_argument("--results", help="run directory")
    p.add_argument("--sequence", help="aggregate label")
    p.add_argument("--n", type=int, default=0, help="pulse count to select")
    p.add_argument("--tau", type=int, default=1)
    p.add_argument("--resamples", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("verify-dd", help="first-order decoupling check")
    p.add_argument("--sequence", default="XY4")
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--coupling", default="random", choices=["random", "x", "y", "z"])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bath-qubits", type=int, default=2)
    p.set_defaults(func=cmd_verify_dd)

    p = sub.add_parser("export-qasm", help="emit one cell as QASM 2.0")
    p.add_argument("--sequence", default="XY4")
    p.add_argument("--n", type=int, required=True, help="pulse count")
    p.add_argument("--tau", type=int, default=1)
    p.add_argument("--theta", type=float)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--bell", choices=["phi+", "psi+"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_qasm)

    p = sub.add_parser("report", help="plot-ready aggregate CSV from a run")
    p.add_argument("--results", required=True)
    p.add_argument("--resamples", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with service_client(args.server) as client:
            return args.func(args, client)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
