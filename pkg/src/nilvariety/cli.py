"""Thin command-line client for the nilvariety service.

Every subcommand speaks the service's JSON API.  Without --server the app is
mounted in-process, so the CLI works offline; with --server URL the same
requests go over the wire.  Exit codes: 0 success, 1 precondition violation
(HTTP 422), 2 internal assertion failure (HTTP 5xx).
"""

from __future__ import annotations

import io
import json
import sys

import click

from .census import read_csv, write_csv
from .serialization import census_record_from_json, census_record_to_json


def _client(server):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    from starlette.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app(), raise_server_exceptions=False)


def _post(client, path, payload):
    resp = client.post(path, json=payload)
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail", resp.text)
    except Exception:
        detail = resp.text
    click.echo(f"error: {detail}", err=True)
    sys.exit(1 if resp.status_code in (400, 422) else 2)


def _read_json(source):
    if source == "-":
        return json.load(sys.stdin)
    with open(source) as fh:
        return json.load(fh)


def _emit(obj):
    click.echo(json.dumps(obj, indent=2))


_server_option = click.option("--server", default=None, envvar="NVL_SERVER",
                              help="Remote service URL; in-process by default.")


@click.group()
def main():
    """Exact computations with rank-one-commutator nilpotent quadruples."""


@main.command()
@click.option("--variety", type=click.Choice(["N", "S"]), default="N")
@click.option("--n", "size", type=int, required=True)
@click.option("--q", "primes", type=int, multiple=True, required=True,
              help="Prime modulus; repeat for several primes in one file.")
@click.option("--stratified", is_flag=True, default=False)
@click.option("--jobs", type=int, default=1)
@click.option("--out", type=click.Path(writable=True), default=None,
              help="CSV output path (stdout when omitted).")
@_server_option
def census(variety, size, primes, stratified, jobs, out, server):
    """Exhaustively count points over one or more prime fields."""
    client = _client(server)
    records = []
    for q in primes:
        data = _post(client, "/census", {"variety": variety, "n": size, "q": q,
                                         "stratified": stratified, "jobs": jobs})
        records.extend(census_record_from_json(rec) for rec in data["records"])
    if out:
        with open(out, "w", newline="") as fh:
            write_csv(records, fh)
        click.echo(f"wrote {len(records)} records to {out}", err=True)
    else:
        buf = io.StringIO()
        write_csv(records, buf)
        click.echo(buf.getvalue(), nl=False)


@main.command()
@click.option("--csv", "csv_path", type=click.Path(exists=True), required=True)
@click.option("--filter", "filter_spec", default="",
              help='Comma-separated key=value list, e.g. "n=3,variety=N".')
@_server_option
def slope(csv_path, filter_spec, server):
    """Fit the log-count / log-q slope of census records."""
    with open(csv_path) as fh:
        records = read_csv(fh)
    payload = {"records": [census_record_to_json(rec) for rec in records],
               "filter": filter_spec}
    _emit(_post(_client(server), "/slope", payload))


def _wrapped_quadruple(source, variety):
    quad = _read_json(source)
    if variety is None:
        variety = quad.get("variety", "N")
    return {"variety": variety, "quadruple": quad}


@main.command()
@click.argument("source", default="-")
@click.option("--variety", type=click.Choice(["N", "S"]), default=None)
@_server_option
def classify(source, variety, server):
    """Module dimensions (r, s) of a quadruple (JSON from file or stdin)."""
    _emit(_post(_client(server), "/classify", _wrapped_quadruple(source, variety)))


@main.command()
@click.argument("source", default="-")
@_server_option
def psi(source, server):
    """Orbit invariant of a middle-stratum quadruple."""
    _emit(_post(_client(server), "/psi", _read_json(source)))


@main.command()
@click.argument("source", default="-")
@_server_option
def canonical(source, server):
    """Canonical representative from orbit coordinates {n, t, field, a, b}."""
    _emit(_post(_client(server), "/canonical", _read_json(source)))


@main.command()
@click.argument("source", default="-")
@click.option("--variety", type=click.Choice(["N", "S"]), default=None)
@_server_option
def stabdim(source, variety, server):
    """Stabilizer dimension (with a basis on the main variety)."""
    _emit(_post(_client(server), "/stabilizer", _wrapped_quadruple(source, variety)))


@main.command("orbit-eq")
@click.argument("first")
@click.argument("second")
@_server_option
def orbit_eq(first, second, server):
    """Decide orbit equivalence of two quadruples and emit a conjugator."""
    payload = {"first": _read_json(first), "second": _read_json(second)}
    _emit(_post(_client(server), "/orbit-equivalent", payload))


@main.command("slice")
@click.argument("source", default="-")
@click.option("--kind", type=click.Choice(["auto", "slice", "regular", "jump"]),
              default="auto")
@_server_option
def slice_cmd(source, kind, server):
    """Build a slice point from slice data, regular-slice parameters, or a
    stratum-jump request."""
    obj = _read_json(source)
    if kind == "auto":
        if "quadruple" in obj:
            kind = "jump"
        else:
            kind = obj.get("kind", "regular" if isinstance(obj.get("alpha"), list)
                            else "slice")
    path = {"slice": "/slice/build", "regular": "/slice/regular",
            "jump": "/slice/jump"}[kind]
    _emit(_post(_client(server), path, obj))


@main.command()
@click.argument("source", default="-")
@click.option("--variety", type=click.Choice(["N", "S"]), default=None)
@_server_option
def triangularize(source, variety, server):
    """Simultaneous triangularization; returns the basis and its inverse."""
    _emit(_post(_client(server), "/triangularize", _wrapped_quadruple(source, variety)))


@main.command()
@click.argument("source", default="-")
@click.option("--tau", required=True, help='Deformation parameter, e.g. "1/2".')
@click.option("--r", "r_target", type=int, default=None)
@_server_option
def deform(source, tau, r_target, server):
    """Move a rank-one-sum quadruple along its deformation line."""
    payload = {"quadruple": _read_json(source), "tau": tau, "r": r_target}
    _emit(_post(_client(server), "/deform", payload))


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the service under uvicorn."""
    import uvicorn

    uvicorn.run("nilvariety.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
