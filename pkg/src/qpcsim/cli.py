"""Thin command-line client for the simulation service.

Subcommands post scenarios to the HTTP API and write the returned artifacts
to disk.  By default the service runs in-process over an ASGI transport, so
no server is needed; ``--server URL`` points the same client at a remote
instance started with ``qpcsim serve``.

Exit codes: 0 completed, 1 usage or configuration error, 2 protocol abort.
"""

from __future__ import annotations

import argparse
import asyncio
import os
import sys
from importlib import resources
from pathlib import Path

import httpx
import yaml

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ABORT = 2

OUT_DIR_ENV = "QPCSIM_OUT"
_DEFAULT_OUT = "qpcsim-out"


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; keep 2 reserved for aborts."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise CliError(message)


class CliError(Exception):
    pass


def _build_parser() -> _Parser:
    parser = _Parser(prog="qpcsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: _Parser) -> None:
        p.add_argument("--server", help="base URL of a running service (default: in-process)")

    run_p = sub.add_parser("run", help="execute one protocol run from a scenario file")
    run_p.add_argument("--scenario", required=True, help="scenario file path or bundled name")
    run_p.add_argument("--seed", type=int, help="override the scenario seed")
    run_p.add_argument("--out", help="output directory for artifacts")
    run_p.add_argument("--format", choices=["text", "records"], help="report format")
    add_common(run_p)

    attack_p = sub.add_parser("attack", help="estimate detection statistics for an attack scenario")
    attack_p.add_argument("--scenario", required=True, help="scenario file path or bundled name")
    attack_p.add_argument("--seed", type=int, help="override the scenario seed")
    attack_p.add_argument("--trials", type=int, help="override the attack trial count")
    attack_p.add_argument("--out", help="output directory for artifacts")
    attack_p.add_argument("--format", choices=["text", "records"], help="report format")
    add_common(attack_p)

    eff_p = sub.add_parser("efficiency", help="print the per-protocol efficiency table")
    eff_p.add_argument("--k", default="3", help="participant count or range, e.g. 3 or 3..10")
    eff_p.add_argument("--m", type=int, default=1, help="privacy length")
    eff_p.add_argument("--format", choices=["text", "csv"], default="text")
    add_common(eff_p)

    audit_p = sub.add_parser("audit", help="run the engine algebra audit")
    audit_p.add_argument("--max-dim", type=int, default=13)
    audit_p.add_argument("--format", choices=["text", "records"], default="text")
    audit_p.add_argument("--out", help="write the audit report to this directory")
    add_common(audit_p)

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)

    return parser


# ---------------------------------------------------------------------------
# HTTP client (remote or in-process)
# ---------------------------------------------------------------------------


def _request(method: str, path: str, server: str | None, **kwargs) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.request(method, path, **kwargs)

    async def go() -> httpx.Response:
        from .service.app import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://qpcsim.internal", timeout=None
        ) as client:
            return await client.request(method, path, **kwargs)

    return asyncio.run(go())


def _detail_of(response: httpx.Response) -> str:
    try:
        detail = response.json().get("detail", response.text)
    except ValueError:
        return response.text
    if isinstance(detail, list):  # pydantic validation errors
        parts = []
        for item in detail:
            loc = ".".join(str(p) for p in item.get("loc", []) if p != "body")
            parts.append(f"{loc}: {item.get('msg', '')}" if loc else item.get("msg", ""))
        return "; ".join(parts)
    return str(detail)


# ---------------------------------------------------------------------------
# Scenario handling
# ---------------------------------------------------------------------------


def _load_scenario(ref: str) -> dict:
    path = Path(ref)
    if not path.exists() and "/" not in ref and "\\" not in ref:
        bundled = resources.files("qpcsim").joinpath("scenarios", f"{ref}.yaml")
        if bundled.is_file():
            return yaml.safe_load(bundled.read_text())
        raise CliError(f"scenario {ref!r}: no such file and no bundled scenario of that name")
    if not path.exists():
        raise CliError(f"scenario {ref!r}: file not found")
    try:
        document = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise CliError(f"scenario {ref!r}: invalid YAML ({exc})") from exc
    if not isinstance(document, dict):
        raise CliError(f"scenario {ref!r}: top level must be a mapping")
    return document


def _apply_overrides(scenario: dict, args: argparse.Namespace) -> dict:
    if getattr(args, "seed", None) is not None:
        scenario["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        attack = scenario.get("attack")
        if not isinstance(attack, dict):
            raise CliError("--trials: scenario has no attack section to override")
        attack["trials"] = args.trials
    if getattr(args, "format", None) is not None:
        scenario.setdefault("output", {})["format"] = args.format
    return scenario


def _out_dir(scenario: dict, args: argparse.Namespace) -> Path:
    if getattr(args, "out", None):
        base = args.out
    else:
        output = scenario.get("output") if isinstance(scenario, dict) else None
        configured = output.get("directory") if isinstance(output, dict) else None
        base = configured or os.environ.get(OUT_DIR_ENV) or _DEFAULT_OUT
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write(path: Path, content: str) -> None:
    path.write_text(content)
    print(f"wrote {path}")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_run(args: argparse.Namespace) -> int:
    scenario = _apply_overrides(_load_scenario(args.scenario), args)
    response = _request("POST", "/run", args.server, json=scenario)
    if response.status_code != 200:
        raise CliError(_detail_of(response))
    body = response.json()
    out = _out_dir(scenario, args)
    fmt = scenario.get("output", {}).get("format", "text")
    _write(out / "transcript.log", body["artifacts"]["transcript"])
    _write(out / "outcome.records", body["artifacts"]["outcome"])
    suffix = "records" if fmt == "records" else "txt"
    _write(out / f"report.{suffix}", body["artifacts"]["report"])
    exit_code = EXIT_OK
    if body["aborted"]:
        print(f"protocol aborted at {body['abort_step']}: {body['abort_reason']}")
        exit_code = EXIT_ABORT
    else:
        for j, chain in enumerate(body["relations"]):
            print(f"R{j + 1}: {chain}")
    if isinstance(scenario.get("attack"), dict) and not body["aborted"]:
        attack_response = _request("POST", "/attack", args.server, json=scenario)
        if attack_response.status_code != 200:
            raise CliError(_detail_of(attack_response))
        attack_body = attack_response.json()
        _write(out / f"attack-report.{suffix}", attack_body["report"])
        print(
            f"attack trials: {attack_body['trials']}, "
            f"detection rate {attack_body['detection_rate']:.4f}"
        )
    return exit_code


def _cmd_attack(args: argparse.Namespace) -> int:
    scenario = _apply_overrides(_load_scenario(args.scenario), args)
    if not isinstance(scenario.get("attack"), dict):
        raise CliError("scenario has no attack section")
    response = _request("POST", "/attack", args.server, json=scenario)
    if response.status_code != 200:
        raise CliError(_detail_of(response))
    body = response.json()
    out = _out_dir(scenario, args)
    fmt = scenario.get("output", {}).get("format", "text")
    suffix = "records" if fmt == "records" else "txt"
    _write(out / f"attack-report.{suffix}", body["report"])
    print(
        f"{body['kind']}: {body['detections']}/{body['trials']} detected "
        f"(rate {body['detection_rate']:.4f}, "
        f"95% CI [{body['ci_low']:.4f}, {body['ci_high']:.4f}])"
    )
    print(
        f"independent-decoy model {body['predicted_detection']:.4f}, "
        f"error-rate-power variant {body['variant_predicted_detection']:.4f}"
    )
    return EXIT_OK


def _parse_k_range(text: str) -> list[int]:
    text = text.strip()
    for sep in ("..", "-"):
        if sep in text:
            lo_s, hi_s = text.split(sep, 1)
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError as exc:
                raise CliError(f"--k: cannot parse range {text!r}") from exc
            if hi < lo:
                raise CliError(f"--k: empty range {text!r}")
            return list(range(lo, hi + 1))
    try:
        return [int(text)]
    except ValueError as exc:
        raise CliError(f"--k: cannot parse {text!r}") from exc


def _cmd_efficiency(args: argparse.Namespace) -> int:
    ks = _parse_k_range(args.k)
    if any(k < 3 for k in ks):
        raise CliError("--k: the protocol requires at least 3 participants")
    params = [("k", str(k)) for k in ks] + [("m", str(args.m))]
    response = _request("GET", "/efficiency", args.server, params=params)
    if response.status_code != 200:
        raise CliError(_detail_of(response))
    body = response.json()
    print(body["csv" if args.format == "csv" else "text"], end="")
    return EXIT_OK


def _cmd_audit(args: argparse.Namespace) -> int:
    response = _request(
        "GET", "/audit", args.server, params={"max_dim": args.max_dim, "format": args.format}
    )
    if response.status_code != 200:
        raise CliError(_detail_of(response))
    body = response.json()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        suffix = "records" if args.format == "records" else "txt"
        _write(out / f"audit-report.{suffix}", body["report"])
    else:
        print(body["report"], end="")
    print(
        f"unitarity {'ok' if body['unitarity_ok'] else 'FAILED'}; "
        f"z-line {'ok' if body['z_line_ok'] else 'FAILED'}; "
        f"x-line holds for {body['x_pass_count']}/{body['x_total']} combinations"
    )
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("qpcsim.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "run": _cmd_run,
            "attack": _cmd_attack,
            "efficiency": _cmd_efficiency,
            "audit": _cmd_audit,
            "serve": _cmd_serve,
        }[args.command]
        return handler(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except httpx.HTTPError as exc:
        print(f"error: request failed: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # keep the exit-code contract total
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
