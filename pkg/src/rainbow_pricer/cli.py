"""Command-line client for the pricing service.

Every command speaks HTTP to the service API. By default the service is
mounted in-process through an ASGI transport, so nothing needs to be
running; ``--server URL`` points the same commands at a live instance.

Commands chain the pipeline: ``ingest`` parses price CSVs,
``fit-margins`` fits the mixture margins, ``calibrate`` solves the
discount-factor loading, ``fit-copula``/``gof``/``select`` handle the
dependence structure, ``price`` values one option, and
``reproduce-tables`` re-prices the bundled reference study.

Reports embed the fully resolved run configuration. JSON keeps full
float precision; CSV uses six significant digits with ``#`` provenance
lines. ``--seed`` (default 42) drives Monte Carlo and bootstrap
sampling; margin fitting uses the EM default seed 0 so repeated runs
are identical. RAINBOW_THREADS caps worker threads (0 = one per CPU).
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

import httpx

from rainbow_pricer import reports

_ALL_FAMILIES = "gaussian,clayton,gumbel,frank,galambos,tawn,husler_reiss"
_BUNDLED_INPUTS = ("sim_asset_a.csv", "sim_asset_b.csv")


class _ServiceError(Exception):
    def __init__(self, record: dict):
        super().__init__(record.get("message", ""))
        self.record = record


class _InProcessClient:
    """Synchronous facade over an in-process ASGI mount of the service."""

    def __init__(self, app):
        self._loop = asyncio.new_event_loop()
        self._client = httpx.AsyncClient(
            transport=httpx.ASGITransport(app=app),
            base_url="http://service.local",
            timeout=None,
        )

    def post(self, path: str, **kw) -> httpx.Response:
        return self._loop.run_until_complete(self._client.post(path, **kw))

    def __enter__(self) -> "_InProcessClient":
        return self

    def __exit__(self, *exc) -> bool:
        self._loop.run_until_complete(self._client.aclose())
        self._loop.close()
        return False


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=None)
    from rainbow_pricer.service import create_app

    return _InProcessClient(create_app())


def _post(client: httpx.Client, path: str, body: dict) -> dict:
    resp = client.post(path, json=body)
    if resp.status_code != 200:
        try:
            data = resp.json()
        except ValueError:
            data = {}
        record = data.get("error")
        if record is None:
            record = {"module": "service", "message": json.dumps(data.get("detail", resp.text))}
        raise _ServiceError(record)
    return resp.json()


def _read_inputs(args) -> list[dict]:
    paths = list(args.input) if args.input else [str(reports.bundled_data_path(n)) for n in _BUNDLED_INPUTS]
    ids = args.assets if args.assets else [Path(p).stem for p in paths]
    if len(ids) != len(paths):
        raise _ServiceError({"module": "cli", "message": "--assets must name each --input file"})
    # write the resolution back so the provenance echo shows real values
    args.input, args.assets = paths, ids
    try:
        return [
            {"asset_id": i, "content": Path(p).read_text(encoding="utf-8")}
            for i, p in zip(ids, paths)
        ]
    except OSError as exc:
        raise _ServiceError({"module": "cli", "message": str(exc)}) from exc


def _ingest(client, args, want: int | None = None) -> dict:
    assets = _read_inputs(args)
    if want is not None and len(assets) != want:
        raise _ServiceError(
            {"module": "cli", "message": f"this command needs exactly {want} input files"}
        )
    return _post(client, "/ingest", {"assets": assets})


def _pair_rows(ingested: dict) -> list[list[float]]:
    cols = ingested["returns"]
    return [[cols[0][i], cols[1][i]] for i in range(len(cols[0]))]


def _families(args) -> list[str]:
    if not getattr(args, "families", None):
        return []
    return [f.strip() for f in args.families.split(",") if f.strip()]


def _load_params(args) -> dict | None:
    p = getattr(args, "params", None)
    if p is None or p == "bundled":
        return None
    try:
        return json.loads(Path(p).read_text(encoding="utf-8"))
    except OSError as exc:
        raise _ServiceError({"module": "cli", "message": str(exc)}) from exc
    except json.JSONDecodeError as exc:
        raise _ServiceError({"module": "cli", "message": f"{p}: {exc}"}) from exc


# ---------------------------------------------------------------- handlers
# each returns (payload for JSON, rows for CSV)


def _cmd_ingest(client, args):
    data = _ingest(client, args)
    rows = [["asset", "n_prices", "first_date", "last_date", "n_returns", "mean", "sd", "skewness", "kurtosis"]]
    for a in data["assets"]:
        s = a["summary"]
        rows.append(
            [a["asset_id"], a["n_prices"], a["first_date"], a["last_date"],
             s["n"], s["mean"], s["sd"], s["skewness"], s["kurtosis"]]
        )
    payload = {"assets": data["assets"], "aligned_n": data["aligned_n"]}
    return payload, rows


def _cmd_fit_margins(client, args):
    data = _ingest(client, args)
    fits = {}
    for a, rets in zip(data["assets"], data["returns"]):
        fits[a["asset_id"]] = _post(client, "/margins/fit", {"returns": rets})
    labels = ["p_1", "mu_1", "sigma_1", "p_2", "mu_2", "sigma_2",
              "loglik", "converged", "mean", "variance", "skewness", "kurtosis"]
    rows = [[""] + list(fits)]
    grid = {k: [] for k in labels}
    for fit in fits.values():
        comps = fit["mixture"]["components"]
        for j, c in enumerate(comps, start=1):
            grid[f"p_{j}"].append(c["p"])
            grid[f"mu_{j}"].append(c["mu"])
            grid[f"sigma_{j}"].append(c["sigma"])
        grid["loglik"].append(fit["diagnostics"]["loglik"])
        grid["converged"].append(fit["diagnostics"]["converged"])
        for k in ("mean", "variance", "skewness", "kurtosis"):
            grid[k].append(fit["moments"][k])
    rows += [[k] + grid[k] for k in labels]
    return {"margins": fits}, rows


def _cmd_calibrate(client, args):
    data = _ingest(client, args)
    out = {}
    for a, rets in zip(data["assets"], data["returns"]):
        fit = _post(client, "/margins/fit", {"returns": rets})
        cal = _post(client, "/sdf/calibrate", {"mixture": fit["mixture"], "rate": args.rate})
        out[a["asset_id"]] = {"mixture": fit["mixture"], **cal}
    rows = [[""] + list(out)]
    for key in ("alpha", "beta", "rate"):
        rows.append([key] + [v[key] for v in out.values()])
    return {"calibration": out}, rows


def _cmd_fit_copula(client, args):
    data = _ingest(client, args, want=2)
    pairs = _pair_rows(data)
    fams = _families(args)
    if not fams:
        raise _ServiceError({"module": "cli", "message": "--families is required"})
    fits = {}
    for fam in fams:
        fits[fam] = _post(client, "/copula/fit", {"data": pairs, "family": fam})
    rows = [[""] + fams]
    rows.append(["parameter"] + ["; ".join(reports.fmt(p) for p in fits[f]["params"]) for f in fams])
    rows.append(["loglik"] + [fits[f]["loglik"] for f in fams])
    rows.append(["boundary"] + [fits[f]["boundary"] for f in fams])
    return {"fits": fits, "n": data["aligned_n"]}, rows


def _cmd_gof(client, args):
    data = _ingest(client, args, want=2)
    pairs = _pair_rows(data)
    fams = _families(args)
    if not fams:
        raise _ServiceError({"module": "cli", "message": "--families is required"})
    out = {}
    for fam in fams:
        out[fam] = _post(
            client,
            "/gof",
            {"data": pairs, "family": fam, "bootstrap": args.bootstrap, "seed": args.seed},
        )
    rows = [[""] + fams]
    rows.append(["parameter"] + ["; ".join(reports.fmt(p) for p in out[f]["params"]) for f in fams])
    rows.append(["statistic"] + [out[f]["statistic"] for f in fams])
    rows.append(["p-value"] + [out[f]["p_value"] for f in fams])
    return {"gof": out, "n": data["aligned_n"]}, rows


def _cmd_select(client, args):
    data = _ingest(client, args, want=2)
    fams = _families(args)
    if not fams:
        raise _ServiceError({"module": "cli", "message": "--families is required"})
    resp = _post(
        client,
        "/copula/select",
        {"data": _pair_rows(data), "families": fams, "bootstrap": args.bootstrap, "seed": args.seed},
    )
    rows = reports.selection_to_rows(resp["entries"])
    return resp, rows


def _build_price_requests(client, args) -> list[tuple[str, dict]]:
    """Assemble one /price request body per requested family."""
    kind = args.kind
    strikes = list(args.strike or [])
    if not strikes:
        raise _ServiceError({"module": "cli", "message": "--strike is required"})

    if args.params is not None:
        params = _load_params(args) or reports.bundled_params()
        rate = args.rate if args.rate is not None else params["rate"]
        spots = args.spots or [120.0] * len(params["assets"])
        assets = [
            {"spot": s, "mixture": a["mixture"], "alpha": a["alpha"]}
            for s, a in zip(spots, params["assets"])
        ]
        fams = _families(args) or list(params["copulas"])
        copulas = {f: {"family": f, "params": params["copulas"][f]} for f in fams}
    else:
        if args.rate is None:
            raise _ServiceError({"module": "cli", "message": "--rate is required with --input"})
        if not args.spots:
            raise _ServiceError({"module": "cli", "message": "--spots is required with --input"})
        rate = args.rate
        spots = args.spots
        data = _ingest(client, args, want=len(spots))
        assets = []
        for spot, rets in zip(spots, data["returns"]):
            fit = _post(client, "/margins/fit", {"returns": rets})
            assets.append({"spot": spot, "mixture": fit["mixture"], "alpha": None})
        copulas = {}
        if len(assets) == 2:
            fams = _families(args)
            if not fams:
                raise _ServiceError({"module": "cli", "message": "--families is required with two assets"})
            pairs = _pair_rows(data)
            for fam in fams:
                fit = _post(client, "/copula/fit", {"data": pairs, "family": fam})
                copulas[fam] = {"family": fit["family"], "params": fit["params"]}
        else:
            copulas = {"": None}

    bodies = []
    for fam, cop in copulas.items():
        body = {
            "assets": assets,
            "rate": rate,
            "copula": cop,
            "kind": kind,
            "n": args.n,
            "seed": args.seed,
        }
        if kind == "digital":
            body["strikes"] = strikes
        else:
            if len(strikes) != 1:
                raise _ServiceError(
                    {"module": "cli", "message": f"{kind} takes exactly one --strike value"}
                )
            body["strike"] = strikes[0]
        bodies.append((fam or "single", body))
    return bodies


def _cmd_price(client, args):
    results = {}
    for fam, body in _build_price_requests(client, args):
        results[fam] = _post(client, "/price", body)
    rows = [["copula", "kind", "price", "std_error", "n", "seed", "reference", "reference_method"]]
    for fam, r in results.items():
        ref = r.get("reference") or {}
        rows.append(
            [fam, r["kind"], r["mc"]["price"], r["mc"]["std_error"], r["mc"]["n"], r["mc"]["seed"],
             ref.get("price"), ref.get("method")]
        )
    return {"prices": results}, rows


def _cmd_reproduce(client, args):
    params = _load_params(args)
    resp = _post(client, "/tables/reproduce", {"params": params, "n": args.n, "seed": args.seed})
    return resp, None


# ----------------------------------------------------------------- plumbing

_HANDLERS = {
    "ingest": _cmd_ingest,
    "fit-margins": _cmd_fit_margins,
    "calibrate": _cmd_calibrate,
    "fit-copula": _cmd_fit_copula,
    "gof": _cmd_gof,
    "select": _cmd_select,
    "price": _cmd_price,
    "reproduce-tables": _cmd_reproduce,
}


def _resolved_config(args) -> dict:
    keys = ("command", "server", "input", "assets", "rate", "families", "kind",
            "strike", "spots", "n", "bootstrap", "seed", "params", "out", "format")
    cfg = {}
    for k in keys:
        if hasattr(args, k):
            cfg[k] = getattr(args, k)
    if cfg.get("server") is None:
        cfg["server"] = "in-process"
    if "params" in cfg and cfg["params"] is None and args.command == "reproduce-tables":
        cfg["params"] = "bundled"
    return cfg


def _emit(args, cfg: dict, payload: dict, rows) -> None:
    if args.format == "json":
        text = json.dumps({"config": cfg, "result": payload}, indent=2) + "\n"
    else:
        header = [f"{k} = {v}" for k, v in cfg.items()]
        text = reports.rows_to_csv(rows, header)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_reproduction(args, cfg: dict, resp: dict) -> None:
    if args.format == "json":
        text = json.dumps({"config": cfg, "result": resp["result"]}, indent=2) + "\n"
        if args.out:
            out = Path(args.out)
            if out.is_dir() or not out.suffix:
                out.mkdir(parents=True, exist_ok=True)
                (out / "tables.json").write_text(text, encoding="utf-8")
            else:
                out.write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    cfg_text = json.dumps({"config": cfg}, indent=2) + "\n"
    (out / "run_config.json").write_text(cfg_text, encoding="utf-8")
    for name, text in resp["csv"].items():
        (out / name).write_text(text, encoding="utf-8")


def _add_io_flags(p: argparse.ArgumentParser, fmt_default: str = "json") -> None:
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=fmt_default,
                   help=f"output format (default: {fmt_default})")
    p.add_argument("--server", help="service URL (default: run the service in-process)")


def _add_input_flags(p: argparse.ArgumentParser, bundled_ok: bool = False) -> None:
    extra = " (default: the bundled simulated data)" if bundled_ok else ""
    p.add_argument("--input", nargs="+", required=not bundled_ok,
                   help=f"price CSV file(s) with header date,close{extra}")
    p.add_argument("--assets", nargs="+", help="asset ids (default: file stems)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rainbow",
        description="Mixture-margin copula pricing of bivariate rainbow options.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and summarize price CSVs")
    _add_input_flags(p)
    _add_io_flags(p)

    p = sub.add_parser("fit-margins", help="fit two-component mixture margins by EM")
    _add_input_flags(p)
    _add_io_flags(p)

    p = sub.add_parser("calibrate", help="fit margins and solve the discount-factor loading")
    _add_input_flags(p)
    p.add_argument("--rate", type=float, required=True, help="risk-free rate per period")
    _add_io_flags(p)

    p = sub.add_parser("fit-copula", help="fit copula families on rank pseudo-observations")
    _add_input_flags(p)
    p.add_argument("--families", required=True, help="comma-separated family list")
    _add_io_flags(p)

    p = sub.add_parser("gof", help="Cramer-von Mises goodness-of-fit with parametric bootstrap")
    _add_input_flags(p)
    p.add_argument("--families", required=True, help="comma-separated family list")
    p.add_argument("--bootstrap", type=int, default=200, help="bootstrap replicates (default: 200)")
    p.add_argument("--seed", type=int, default=42, help="random seed (default: 42)")
    _add_io_flags(p)

    p = sub.add_parser("select", help="rank copula families by likelihood and fit criteria")
    _add_input_flags(p, bundled_ok=True)
    p.add_argument("--families", default=_ALL_FAMILIES,
                   help=f"comma-separated family list (default: {_ALL_FAMILIES})")
    p.add_argument("--bootstrap", type=int, default=0,
                   help="bootstrap replicates for p-values (default: 0 = skip)")
    p.add_argument("--seed", type=int, default=42, help="random seed (default: 42)")
    _add_io_flags(p, fmt_default="csv")

    p = sub.add_parser("price", help="price one rainbow option")
    _add_input_flags(p, bundled_ok=True)
    p.add_argument("--params", nargs="?", const="bundled",
                   help="price from a calibrated parameter file instead of fitting "
                        "(default file: the bundled reference parameters)")
    p.add_argument("--rate", type=float, help="risk-free rate per period")
    p.add_argument("--families", help="comma-separated copula families")
    p.add_argument("--kind", required=True, choices=("spread", "call_max", "call_min", "digital"))
    p.add_argument("--strike", "-k", "--k", nargs="+", type=float,
                   help="strike (two values for digital: one per asset)")
    p.add_argument("--spots", nargs="+", type=float, help="spot price per asset")
    p.add_argument("--n", type=int, default=100_000, help="Monte Carlo samples (default: 100000)")
    p.add_argument("--seed", type=int, default=42, help="random seed (default: 42)")
    _add_io_flags(p)

    p = sub.add_parser("reproduce-tables", help="re-price the bundled reference study")
    p.add_argument("--params", default=None,
                   help="parameter file (default: the bundled reference parameters)")
    p.add_argument("--n", type=int, default=100_000, help="Monte Carlo samples (default: 100000)")
    p.add_argument("--seed", type=int, default=42, help="random seed (default: 42)")
    _add_io_flags(p, fmt_default="csv")

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _client(args.server) as client:
            payload, rows = _HANDLERS[args.command](client, args)
        cfg = _resolved_config(args)
        if args.command == "reproduce-tables":
            _emit_reproduction(args, cfg, payload)
        else:
            _emit(args, cfg, payload, rows)
    except _ServiceError as exc:
        record = {"error": {**exc.record, "command": args.command}}
        print(json.dumps(record))
        return 1
    except httpx.HTTPError as exc:
        record = {"error": {"module": "cli", "message": str(exc), "command": args.command}}
        print(json.dumps(record))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
