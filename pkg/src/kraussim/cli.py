"""Command-line front end.

Commands talk to the HTTP service layer: in-process by default, or against
a running server via --server. Angles are taken in degrees here and
converted at the service boundary. Exit codes: 0 ok, 2 bad configuration,
3 output I/O failure.
"""
from __future__ import annotations

import json
import secrets

import click


class ServiceClient:
    """POST wrapper over either an in-process app or a remote base URL."""

    def __init__(self, server: str | None = None):
        if server is None:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)
        else:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)

    def post(self, path: str, payload: dict) -> dict:
        response = self._client.post(path, json=payload)
        body = response.json()
        if response.status_code == 422:
            detail = body.get("detail", [])
            if isinstance(detail, list) and detail:
                loc = detail[0].get("loc", [])
                field = ".".join(str(part) for part in loc if part != "body") or "request"
                message = detail[0].get("msg", "invalid value")
            else:
                field, message = "request", str(detail)
            click.echo(f"error: invalid {field}: {message}", err=True)
            raise SystemExit(2)
        if response.status_code >= 400:
            name = body.get("error", "error") if isinstance(body, dict) else "error"
            detail = body.get("detail", body) if isinstance(body, dict) else body
            click.echo(f"error: {name}: {detail}", err=True)
            raise SystemExit(2)
        return body


def _emit(text: str, out_path: str | None):
    if out_path is None:
        click.echo(text, nl=False)
        if not text.endswith("\n"):
            click.echo()
        return
    try:
        with open(out_path, "w", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        click.echo(f"error: cannot write {out_path}: {exc}", err=True)
        raise SystemExit(3)


def _channel_params(kind, lam, gamma, theta, phi) -> dict:
    params = {"kind": kind}
    if lam is not None:
        params["lambda"] = lam
    if gamma is not None:
        params["gamma"] = gamma
    if theta is not None:
        params["theta_deg"] = theta
    if phi is not None:
        params["phi_deg"] = phi
    return params


def _parse_source(text: str, rate: float) -> dict:
    if text == "ideal":
        return {"kind": "ideal", "pair_rate": rate}
    if text == "werner":
        return {"kind": "werner", "pair_rate": rate}
    if text.startswith("werner:"):
        try:
            visibility = float(text.split(":", 1)[1])
        except ValueError:
            raise click.BadParameter(f"bad visibility in {text!r}", param_hint="--source")
        return {"kind": "werner", "visibility": visibility, "pair_rate": rate}
    raise click.BadParameter(f"expected ideal or werner[:V], got {text!r}", param_hint="--source")


def _resolve_seed(seed: int | None) -> int:
    if seed is None:
        seed = secrets.randbits(32)
        click.echo(f"seed: {seed}", err=True)
    return seed


@click.group()
@click.option("--server", default=None, metavar="URL", help="Base URL of a running service (default: in-process).")
@click.pass_context
def main(ctx, server):
    """Signed-decomposition channel simulator."""
    ctx.obj = ServiceClient(server)


_KIND = click.Choice(["dp", "gad", "ad", "dephasing", "trig"])
_FAMILY = click.Choice(["dp", "gad", "ad", "dephasing"])


@main.command()
@click.option("--kind", type=_KIND, required=True)
@click.option("--lambda", "lam", type=float, default=None, help="Channel strength in [0, 1].")
@click.option("--gamma", type=float, default=None, help="Stationary excited population (gad).")
@click.option("--theta", type=float, default=None, help="Trig family angle, degrees.")
@click.option("--phi", type=float, default=None, help="Trig family angle, degrees.")
@click.option("--dt", type=float, default=10.0, show_default=True, help="Acquisition window, seconds.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def channel(client, kind, lam, gamma, theta, phi, dt, out):
    """Report Kraus operators, affine and canonical forms, and weights."""
    body = client.post("/channel", {"params": _channel_params(kind, lam, gamma, theta, phi), "dt": dt})
    _emit(json.dumps(body, indent=2), out)


@main.command()
@click.option("--kind", type=_FAMILY, required=True)
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--gamma", type=float, default=None)
@click.option("--dt", type=float, default=10.0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def decompose(client, kind, lam, gamma, dt, out):
    """Print the signed operator weights and the time partition."""
    body = client.post("/decompose", {"params": _channel_params(kind, lam, gamma, None, None), "dt": dt})
    _emit(json.dumps(body, indent=2), out)


@main.command()
@click.option("--kind", type=click.Choice(["dp", "gad"]), required=True)
@click.option("--gamma", type=float, default=0.0, show_default=True)
@click.option("--steps", type=int, default=101, show_default=True)
@click.option("--source", default="werner", show_default=True, help="ideal or werner[:V].")
@click.option("--rate", type=float, default=1e4, show_default=True, help="Pair rate, counts/second.")
@click.option("--dt", type=float, default=10.0, show_default=True)
@click.option("--seed", type=int, default=None, help="Drawn and printed when absent.")
@click.option("--method", type=click.Choice(["linear", "mle"]), default="linear", show_default=True)
@click.option("--exact", is_flag=True, help="Replace Poisson draws with their expectations.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.pass_obj
def sweep(client, kind, gamma, steps, source, rate, dt, seed, method, exact, out, fmt):
    """Run a lambda sweep and emit per-point metrics."""
    payload = {
        "kind": kind,
        "gamma": gamma,
        "steps": steps,
        "source": _parse_source(source, rate),
        "dt": dt,
        "seed": _resolve_seed(seed),
        "method": method,
        "exact": exact,
    }
    body = client.post("/sweep", payload)
    _emit(body["csv"] if fmt == "csv" else json.dumps(body, indent=2), out)


@main.command()
@click.option("--kind", type=_FAMILY, required=True)
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--gamma", type=float, default=None)
@click.option("--source", default="werner", show_default=True, help="ideal or werner[:V].")
@click.option("--rate", type=float, default=1e4, show_default=True)
@click.option("--dt", type=float, default=10.0, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--method", type=click.Choice(["linear", "mle"]), default="linear", show_default=True)
@click.option("--exact", is_flag=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def tomo(client, kind, lam, gamma, source, rate, dt, seed, method, exact, out):
    """Simulate one protocol run and print records plus the reconstruction."""
    payload = {
        "params": _channel_params(kind, lam, gamma, None, None),
        "source": _parse_source(source, rate),
        "dt": dt,
        "seed": _resolve_seed(seed),
        "method": method,
        "exact": exact,
    }
    body = client.post("/tomo", payload)
    _emit(json.dumps(body, indent=2), out)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service under uvicorn."""
    import uvicorn

    uvicorn.run("kraussim.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
