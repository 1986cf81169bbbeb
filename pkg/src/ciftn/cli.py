"""Command-line client for the simulation service.

Each subcommand builds the same request model the HTTP endpoints accept and
either executes it in-process (default) or posts it to a running service via
--server.  A flat key=value config file can pre-populate any flag; explicit
flags win.
"""
from __future__ import annotations

import sys

import click

from .errors import CiftnError
from .service import models as m
from .service.app import handle_ber, handle_isi_table, handle_se, handle_trace


def _parse_ebn0(text: str) -> list[float]:
    """Sweep syntax: 'start:step:stop' (stop inclusive) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise click.BadParameter("expected start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise click.BadParameter("step must be positive")
        out = []
        v = start
        while v <= stop + 1e-9:
            out.append(round(v, 10))
            v += step
        return out
    return [float(p) for p in text.split(",") if p.strip()]


def _load_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise click.BadParameter(f"config line without '=': {raw.strip()!r}")
            key, val = (p.strip() for p in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


_BOOL_TRUE = {"1", "true", "yes", "on"}


def _merge_config(ctx: click.Context, values: dict, config_path: str | None) -> dict:
    """Overlay config-file values onto parameters the user left at defaults."""
    if not config_path:
        return values
    file_vals = _load_config_file(config_path)
    merged = dict(values)
    for key, text in file_vals.items():
        if key not in values:
            raise click.BadParameter(f"unknown config key {key!r}")
        src = ctx.get_parameter_source(key)
        if src is not None and src.name != "DEFAULT":
            continue  # explicit flag wins
        current = values[key]
        if isinstance(current, bool):
            merged[key] = text.lower() in _BOOL_TRUE
        elif key == "ebn0":
            merged[key] = text
        elif isinstance(current, int) and not isinstance(current, bool):
            merged[key] = int(text)
        elif isinstance(current, float):
            merged[key] = float(text)
        elif current is None:
            # typed options left at None: infer numeric, else keep string
            try:
                merged[key] = float(text) if "." in text else int(text)
            except ValueError:
                merged[key] = text
        else:
            merged[key] = text
    return merged


def _post(server: str, path: str, payload: dict, model):
    import httpx

    resp = httpx.post(f"{server.rstrip('/')}{path}", json=payload, timeout=None)
    if resp.status_code != 200:
        raise click.ClickException(f"server error {resp.status_code}: {resp.text}")
    return model.model_validate(resp.json())


def _write_out(out: str | None, text: str):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(text, nl=False)


@click.group()
def main():
    """Link-level simulator for coordinate-interleaved faster-than-Nyquist signaling."""


@main.command()
@click.option("--mode", default="ci_ftn", show_default=True,
              type=click.Choice(["ci_ftn", "conventional_ftn", "nyquist_bpsk", "nyquist_qpsk"]))
@click.option("--detector", default="pairwise", show_default=True,
              type=click.Choice(["pairwise", "zf", "mlse"]))
@click.option("--tau", default=1.0, show_default=True, type=float)
@click.option("--alpha", default=0.3, show_default=True, type=float)
@click.option("--isi-len", "isi_len", default=None, type=int,
              help="One-sided ISI length L; default per tail-energy rule.")
@click.option("--ebn0", default="0:1:10", show_default=True,
              help="Sweep as start:step:stop (inclusive) or comma list.")
@click.option("--frame-len", "frame_len", default=672, show_default=True, type=int)
@click.option("--coded", is_flag=True, default=False, help="Rate-1/2 (672,336) LDPC path.")
@click.option("--ldpc-iters", "ldpc_iters", default=50, show_default=True, type=int)
@click.option("--frames", default=None, type=int,
              help="Cap on simulated frames per point (overrides --max-bits).")
@click.option("--max-bits", "max_bits", default=2e8, show_default=True, type=float)
@click.option("--min-errors", "min_errors", default=200, show_default=True, type=int)
@click.option("--allow-low-errors", "allow_low_errors", is_flag=True, default=False,
              help="Permit stopping below 100 bit errors (reduced confidence).")
@click.option("--seed", default=1, show_default=True, type=int)
@click.option("--fidelity", default="auto", show_default=True,
              type=click.Choice(["auto", "matrix", "waveform"]))
@click.option("--oversampling", default=16, show_default=True, type=int)
@click.option("--zeta", default=None, type=float, help="Override the energy normalization.")
@click.option("--workers", default=1, show_default=True, type=int)
@click.option("--out", default=None, type=click.Path(), help="CSV output path (default stdout).")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True),
              help="key=value file supplying defaults for any flag.")
@click.option("--server", default=None, help="Base URL of a running service.")
@click.pass_context
def ber(ctx, **kw):
    """Monte Carlo BER sweep; emits CSV (ebn0_db,bits,errors,ber,ci_halfwidth)."""
    server = kw.pop("server")
    out = kw.pop("out")
    config_path = kw.pop("config_path")
    kw = _merge_config(ctx, kw, config_path)
    frames = kw.pop("frames")
    max_bits = kw.pop("max_bits")
    if frames is not None:
        per_frame = 336 if kw["coded"] else kw["frame_len"]
        max_bits = float(frames * per_frame)
    req = m.BerRequest(
        mode=kw["mode"],
        detector=kw["detector"],
        pulse=m.PulseParams(alpha=kw["alpha"], tau=kw["tau"], isi_len=kw["isi_len"],
                            oversampling=kw["oversampling"]),
        ebn0_db=_parse_ebn0(kw["ebn0"]),
        frame_len=kw["frame_len"],
        coded=kw["coded"],
        ldpc_iters=kw["ldpc_iters"],
        min_errors=kw["min_errors"],
        max_bits=max_bits,
        seed=kw["seed"],
        fidelity=kw["fidelity"],
        workers=kw["workers"],
        zeta=kw["zeta"],
        allow_low_errors=kw["allow_low_errors"],
    )
    try:
        resp = (_post(server, "/v1/ber", req.model_dump(), m.BerResponse)
                if server else handle_ber(req))
    except CiftnError as exc:
        raise click.ClickException(str(exc))
    _write_out(out, resp.csv)


@main.command("isi-table")
@click.option("--alpha", default=0.3, show_default=True, type=float)
@click.option("--isi-len", "isi_len", default=12, show_default=True, type=int)
@click.option("--taus", default="0.9,0.8,0.7,0.6,0.5,0.4", show_default=True)
@click.option("--zeta", default=None, type=float,
              help="Pin the normalization for every row (reference table fixes it at tau=0.6).")
@click.option("--out", default=None, type=click.Path())
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.option("--server", default=None)
@click.pass_context
def isi_table_cmd(ctx, **kw):
    """Worst-case interference table over tau, alongside the reference values."""
    server = kw.pop("server")
    out = kw.pop("out")
    config_path = kw.pop("config_path")
    kw = _merge_config(ctx, kw, config_path)
    req = m.IsiTableRequest(
        taus=[float(t) for t in str(kw["taus"]).split(",") if t.strip()],
        alpha=kw["alpha"],
        isi_len=kw["isi_len"],
        zeta=kw["zeta"],
    )
    try:
        resp = (_post(server, "/v1/isi-table", req.model_dump(), m.IsiTableResponse)
                if server else handle_isi_table(req))
    except CiftnError as exc:
        raise click.ClickException(str(exc))
    for r in resp.rows:
        dev_c = (r.conventional / r.conventional_ref - 1.0) * 100 if r.conventional_ref else float("nan")
        dev_i = (r.ci / r.ci_ref - 1.0) * 100 if r.ci_ref else float("nan")
        click.echo(
            f"tau={r.tau:g}: conventional {r.conventional:.4f} (ref {r.conventional_ref}, "
            f"{dev_c:+.1f}%) | ci {r.ci:.4f} (ref {r.ci_ref}, {dev_i:+.1f}%)",
            err=True,
        )
    _write_out(out, resp.csv)


@main.command()
@click.option("--tau", default=0.6, show_default=True, type=float)
@click.option("--alpha", default=0.3, show_default=True, type=float)
@click.option("--isi-len", "isi_len", default=None, type=int)
@click.option("--out", default=None, type=click.Path(), help="CSV output path.")
@click.option("--server", default=None)
def trace(tau, alpha, isi_len, out, server):
    """Noiseless six-symbol worked example with the interference budget."""
    req = m.TraceRequest(tau=tau, alpha=alpha, isi_len=isi_len)
    try:
        resp = (_post(server, "/v1/trace", req.model_dump(), m.TraceResponse)
                if server else handle_trace(req))
    except CiftnError as exc:
        raise click.ClickException(str(exc))
    click.echo(resp.text, nl=False, err=True)
    if out:
        _write_out(out, resp.csv)
    else:
        click.echo(resp.csv, nl=False)


@main.command()
@click.option("--mode", default="ci_ftn", show_default=True,
              type=click.Choice(["ci_ftn", "conventional_ftn", "nyquist_bpsk", "nyquist_qpsk"]))
@click.option("--tau", default=0.45, show_default=True, type=float)
@click.option("--alpha", default=0.3, show_default=True, type=float)
@click.option("--server", default=None)
def se(mode, tau, alpha, server):
    """Spectral efficiency of a mode, plus the QPSK reference at the same alpha."""
    rows = [m.SeRequest(mode=mode, tau=tau, alpha=alpha)]
    if mode != "nyquist_qpsk":
        rows.append(m.SeRequest(mode="nyquist_qpsk", tau=1.0, alpha=alpha))
    click.echo("mode,tau,alpha,bits_per_symbol,se")
    for req in rows:
        try:
            resp = (_post(server, "/v1/se", req.model_dump(), m.SeResponse)
                    if server else handle_se(req))
        except (CiftnError, ValueError) as exc:
            raise click.ClickException(str(exc))
        click.echo(
            f"{resp.mode},{resp.tau:g},{resp.alpha:g},{resp.bits_per_symbol:g},"
            f"{resp.spectral_efficiency:.2f}"
        )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("ciftn.service.app:app", host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
