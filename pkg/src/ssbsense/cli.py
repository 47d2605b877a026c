"""Command-line client for the batch experiments.

Thin client over the HTTP service: by default the requests run against
an in-process application instance (no server needed, no timeouts);
``--server`` points them at a running instance instead.

Subcommands: ``crb`` (bound curves), ``rmse`` (estimator error vs bound),
``detect`` (Pd/Pfa deactivation sweep), ``serve`` (run the HTTP service).

Seed precedence: ``--seed`` flag, then the config file's ``seed``, then
the SSBSENSE_SEED environment variable, then the built-in default.
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx

from ssbsense.harness import default_seed

EXPERIMENT_BY_COMMAND = {
    "crb": "crb-curves",
    "rmse": "rmse",
    "detect": "detection-sweep",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssbsense",
        description="Bistatic passive sensing experiments on swept synchronization-block beams",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for command, experiment in EXPERIMENT_BY_COMMAND.items():
        p = sub.add_parser(command, help=f"run the {experiment} experiment")
        p.add_argument("--config", required=True, help="experiment config JSON (docs/config.md)")
        p.add_argument("--seed", type=int, default=None, help="override the experiment seed")
        p.add_argument("--trials", type=int, default=None, help="override the trial count")
        p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
        p.add_argument("--server", default=None, help="HTTP service URL (default: in-process)")
        p.add_argument("--timeout", type=float, default=None, help="HTTP timeout in seconds for --server")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _post(server: str | None, timeout: float | None, path: str, payload: dict) -> httpx.Response:
    if server is None:
        import asyncio

        from ssbsense.service import create_app

        async def go() -> httpx.Response:
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://ssbsense.local", timeout=None
            ) as client:
                return await client.post(path, json=payload)

        return asyncio.run(go())
    with httpx.Client(base_url=server, timeout=timeout) as client:
        return client.post(path, json=payload)


def _run_experiment_command(args: argparse.Namespace) -> int:
    experiment = EXPERIMENT_BY_COMMAND[args.command]
    try:
        with open(args.config, "r", encoding="utf-8") as f:
            config = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
        return 2
    if not isinstance(config, dict):
        print(f"error: {args.config} must contain a JSON object", file=sys.stderr)
        return 2
    config.setdefault("experiment", experiment)
    if config["experiment"] != experiment:
        print(
            f"error: config is for experiment {config['experiment']!r}, "
            f"but the {args.command} subcommand runs {experiment!r}",
            file=sys.stderr,
        )
        return 2
    seed = args.seed
    if seed is None and "seed" not in config:
        seed = default_seed()

    payload = {"config": config, "seed": seed, "trials": args.trials}
    try:
        resp = _post(args.server, args.timeout, "/experiments/run", payload)
    except httpx.HTTPError as exc:
        print(f"error: request failed: {exc}", file=sys.stderr)
        return 1
    if resp.status_code == 422:
        print(f"error: {resp.json().get('detail', resp.text)}", file=sys.stderr)
        return 2
    if resp.status_code != 200:
        print(f"error: service returned {resp.status_code}: {resp.text}", file=sys.stderr)
        return 1

    csv_text = resp.json()["csv_text"]
    if args.out is None:
        sys.stdout.write(csv_text)
    else:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as f:
                f.write(csv_text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {args.out}", file=sys.stderr)
    return 0


def _serve(args: argparse.Namespace) -> int:
    import uvicorn

    from ssbsense.service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return _serve(args)
    return _run_experiment_command(args)


if __name__ == "__main__":
    sys.exit(main())
