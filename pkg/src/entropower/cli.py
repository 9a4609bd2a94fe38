"""Thin command-line client of the HTTP service.

Every subcommand serializes its arguments into one request, posts it (by
default against the in-process app, or against ``--url`` for a remote
server), and renders the JSON response.  Exit status: 0 on success, 1 on
domain/precondition errors (HTTP 422), 2 on numerical failures (HTTP 500)
and transport errors.  Output uses fixed 9-significant-digit formatting so
identical invocations are byte-identical.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys

import httpx

from .verify import format_float

_FAMILIES = ("gaussian", "student-t", "student-r", "laplace", "uniform",
             "grid-file")


class CliError(Exception):
    """Argument or payload problem detected before any request is sent."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(parser: _Parser) -> None:
    parser.add_argument("--url", default=None,
                        help="base URL of a running service; default runs "
                             "the app in-process")
    parser.add_argument("--json", action="store_true", dest="as_json",
                        help="print the full JSON response")


def _add_state_args(parser: _Parser) -> None:
    parser.add_argument("--family", choices=_FAMILIES, default="gaussian")
    parser.add_argument("--d", type=int, default=1)
    parser.add_argument("--nu", type=float, default=None)
    parser.add_argument("--covariance", type=float, default=None)
    parser.add_argument("--scale", type=float, default=None)
    parser.add_argument("--grid-file", default=None,
                        help="CSV grid produced by the states module")


def _add_discrete_args(parser: _Parser) -> None:
    parser.add_argument("--discrete-kind",
                        choices=("kronecker", "flat", "random", "explicit"),
                        default="kronecker")
    parser.add_argument("--n", type=int, default=None)
    parser.add_argument("--position", type=int, default=0)
    parser.add_argument("--re", default=None,
                        help="comma-separated real parts of the amplitudes")
    parser.add_argument("--im", default=None,
                        help="comma-separated imaginary parts")


def _build_parser() -> _Parser:
    parser = _Parser(prog="entropower", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("classify",
                       help="region of an index pair")
    _add_common(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("bound",
                       help="constant lower bounds")
    _add_common(p)
    p.add_argument("--kind", choices=("general", "B", "conjugated", "maassen"),
                   default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--setting", choices=("cc", "dd", "dc"), default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--p", type=float, default=None)

    p = sub.add_parser("npower",
                       help="entropy power of a state or its conjugate")
    _add_common(p)
    _add_state_args(p)
    p.add_argument("--lam", required=True,
                   help="entropic index (a float, or inf)")
    p.add_argument("--side", choices=("state", "conjugate"), default="state")
    p.add_argument("--convention", choices=("density", "amplitude"),
                   default="density")
    p.add_argument("--method", choices=("auto", "quadrature"), default="auto")

    p = sub.add_parser("product",
                       help="uncertainty product against its bound")
    _add_common(p)
    p.add_argument("--setting", choices=("cc", "dd", "dc"), default="cc")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    _add_state_args(p)
    _add_discrete_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--convention", choices=("density", "amplitude"),
                   default="density")
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("sweep",
                       help="parameter sweep emitting CSV")
    _add_common(p)
    p.add_argument("--kind", choices=("lambda", "alpha_diagonal", "nu"),
                   required=True)
    _add_state_args(p)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--grid", default=None,
                   help="comma-separated grid override")
    p.add_argument("--convention", choices=("density", "amplitude"),
                   default="density")
    p.add_argument("--output", default=None,
                   help="write the CSV here (plus a .meta.json sidecar) "
                        "instead of stdout")

    p = sub.add_parser("verify",
                       help="verify the inequality over states and pairs")
    _add_common(p)
    p.add_argument("--setting", choices=("cc", "dd"), default="cc")
    p.add_argument("--family", action="append", default=None,
                   metavar="NAME[:NU]",
                   help="continuous family, repeatable (e.g. student-t:3)")
    p.add_argument("--n", action="append", type=int, default=None,
                   help="random discrete state size, repeatable")
    p.add_argument("--pairs", default=None, metavar="A:B[,A:B...]",
                   help="explicit index pairs")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--on-c", type=int, default=20)
    p.add_argument("--in-s", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--no-prefilter", action="store_true")

    p = sub.add_parser("counterexample",
                       help="drive the product below epsilon in D0")
    _add_common(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--d", type=int, default=1)

    return parser


# ---------------------------------------------------------------------------
# payload construction
# ---------------------------------------------------------------------------


def _state_payload(args) -> dict:
    if args.family == "grid-file":
        if not args.grid_file:
            raise CliError("--family grid-file requires --grid-file PATH")
        from .states import grid_from_csv

        try:
            grid = grid_from_csv(args.grid_file)
        except OSError as err:
            raise CliError(f"cannot read grid file: {err}") from None
        spec: dict = {
            "family": "grid", "d": grid.d,
            "grid": {
                "origin": [float(v) for v in grid.origin],
                "spacing": [float(v) for v in grid.spacing],
                "re": [float(v) for v in grid.samples.real.ravel()],
                "im": [float(v) for v in grid.samples.imag.ravel()],
                "shape": [int(v) for v in grid.samples.shape],
            },
        }
    else:
        spec = {"family": args.family, "d": args.d}
        if args.nu is not None:
            spec["nu"] = args.nu
        if args.covariance is not None:
            spec["covariance"] = args.covariance
    if args.scale is not None:
        spec["scale"] = args.scale
    return spec


def _discrete_payload(args) -> dict:
    spec: dict = {"kind": args.discrete_kind}
    if args.n is not None:
        spec["n"] = args.n
    if args.discrete_kind == "kronecker":
        spec["position"] = args.position
    if args.discrete_kind == "random":
        spec["seed"] = args.seed
    if args.re is not None:
        spec["re"] = _float_list(args.re, "--re")
    if args.im is not None:
        spec["im"] = _float_list(args.im, "--im")
    return spec


def _float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise CliError(f"{flag} must be comma-separated floats, "
                       f"got {text!r}") from None


def _pairs_payload(text: str) -> list[dict]:
    pairs = []
    for item in text.split(","):
        parts = item.split(":")
        if len(parts) != 2:
            raise CliError(f"pairs must look like A:B, got {item!r}")
        try:
            pairs.append({"alpha": float(parts[0]), "beta": float(parts[1])})
        except ValueError:
            raise CliError(f"pairs must look like A:B, got {item!r}") from None
    return pairs


def _families_payload(values: list[str]) -> list[dict]:
    specs = []
    for value in values:
        name, _, nu = value.partition(":")
        if name not in ("gaussian", "student-t", "student-r", "laplace",
                        "uniform"):
            raise CliError(f"unknown family {name!r}")
        spec: dict = {"family": name, "d": 1}
        if nu:
            try:
                spec["nu"] = float(nu)
            except ValueError:
                raise CliError(f"bad nu in family {value!r}") from None
        specs.append(spec)
    return specs


def _request_for(args) -> tuple[str, dict]:
    cmd = args.subcommand
    if cmd == "classify":
        payload = {"alpha": args.alpha, "beta": args.beta}
        if args.tol is not None:
            payload["tol"] = args.tol
        return "/classify", payload
    if cmd == "bound":
        kind = args.kind
        if kind is None:
            # infer the natural kind from the supplied flags
            if args.setting == "dd" and args.n is not None:
                kind = "maassen"
            elif args.setting is not None:
                kind = "conjugated"
            elif args.beta is None and args.alpha is not None:
                kind = "B"
            else:
                kind = "general"
        payload = {"kind": kind}
        for key in ("alpha", "beta", "setting", "n", "p"):
            value = getattr(args, key)
            if value is not None:
                payload[key] = value
        if kind == "maassen":
            payload.pop("setting", None)
        return "/bound", payload
    if cmd == "npower":
        try:
            lam: float | str = float(args.lam)
        except ValueError:
            lam = args.lam
        if isinstance(lam, float) and lam == float("inf"):
            lam = "inf"
        return "/npower", {"state": _state_payload(args), "lam": lam,
                           "side": args.side, "convention": args.convention,
                           "method": args.method}
    if cmd == "product":
        payload = {"setting": args.setting, "alpha": args.alpha,
                   "beta": args.beta, "convention": args.convention}
        if args.setting == "cc":
            payload["state"] = _state_payload(args)
        else:
            payload["discrete"] = _discrete_payload(args)
        if args.tol is not None:
            payload["tol"] = args.tol
        return "/product", payload
    if cmd == "sweep":
        payload = {"kind": args.kind, "d": args.d,
                   "convention": args.convention}
        if args.kind in ("lambda", "alpha_diagonal"):
            payload["state"] = _state_payload(args)
        if args.alpha is not None:
            payload["alpha"] = args.alpha
        if args.beta is not None:
            payload["beta"] = args.beta
        if args.grid is not None:
            payload["grid"] = _float_list(args.grid, "--grid")
        return "/sweep", payload
    if cmd == "verify":
        payload = {"setting": args.setting, "tol": args.tol,
                   "prefilter": not args.no_prefilter}
        if args.setting == "cc":
            if not args.family:
                raise CliError("verify --setting cc needs at least one "
                               "--family")
            payload["families"] = _families_payload(args.family)
        else:
            if not args.n:
                raise CliError("verify --setting dd needs at least one --n")
            payload["discretes"] = [{"kind": "random", "n": n,
                                     "seed": args.seed + i}
                                    for i, n in enumerate(args.n)]
        if args.pairs is not None:
            payload["pairs"] = _pairs_payload(args.pairs)
        else:
            payload["sample"] = {"n": args.samples, "on_c": args.on_c,
                                 "in_s": args.in_s, "seed": args.seed}
        return "/verify", payload
    # counterexample
    return "/counterexample", {"alpha": args.alpha, "beta": args.beta,
                               "epsilon": args.epsilon, "d": args.d}


# ---------------------------------------------------------------------------
# transport
# ---------------------------------------------------------------------------


async def _post_async(url: str | None, path: str,
                      payload: dict) -> httpx.Response:
    if url:
        async with httpx.AsyncClient(base_url=url, timeout=300.0) as client:
            return await client.post(path, json=payload)
    from .service import app

    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport, timeout=None,
                                 base_url="http://entropower.local") as client:
        return await client.post(path, json=payload)


def _post(url: str | None, path: str, payload: dict) -> httpx.Response:
    return asyncio.run(_post_async(url, path, payload))


def _detail_line(body) -> str:
    detail = body.get("detail", body) if isinstance(body, dict) else body
    if isinstance(detail, list):
        parts = []
        for item in detail:
            loc = ".".join(str(v) for v in item.get("loc", [])[1:])
            msg = item.get("msg", str(item))
            parts.append(f"{loc}: {msg}" if loc else msg)
        return "; ".join(parts)
    return str(detail)


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _render(args, body) -> int:
    if args.as_json:
        print(json.dumps(body, indent=2, sort_keys=True))
        return 0
    cmd = args.subcommand
    if cmd == "classify":
        print(body["region"])
        print(body["message"])
    elif cmd == "bound":
        if body["value"] is None:
            print(body["description"])
        else:
            print(format_float(body["value"]))
    elif cmd == "npower":
        if body["divergent"]:
            print(f"divergent: {body['caveat']}")
        else:
            print(format_float(body["value"]))
    elif cmd == "product":
        print(format_float(body["product"]))
    elif cmd == "sweep":
        if args.output:
            base, _ = os.path.splitext(args.output)
            sidecar = base + ".meta.json"
            with open(args.output, "w") as fh:
                fh.write(body["csv"])
            with open(sidecar, "w") as fh:
                json.dump(body["metadata"], fh, indent=2, sort_keys=True)
                fh.write("\n")
            print(args.output)
            print(sidecar)
        else:
            sys.stdout.write(body["csv"])
    elif cmd == "verify":
        s = body["summary"]
        print(f"total={s['total']} holds={s['holds']} "
              f"violated={s['violated']} no-bound={s['no_bound']}")
        for entry in s["filtered"]:
            print(f"family={entry['family']} used={entry['used']} "
                  f"skipped={entry['skipped']}")
        if s["violated"] > 0:
            return 2
    else:  # counterexample
        print(f"nu {format_float(body['nu'])}")
        print(f"nu_star {format_float(body['nu_star'])}")
        print(f"product {format_float(body['report']['product'])}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        path, payload = _request_for(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    try:
        response = _post(args.url, path, payload)
    except httpx.HTTPError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if response.status_code == 422:
        print(f"error: {_detail_line(response.json())}", file=sys.stderr)
        return 1
    if response.status_code >= 400:
        print(f"error: {_detail_line(response.json())}", file=sys.stderr)
        return 2
    return _render(args, response.json())


if __name__ == "__main__":
    sys.exit(main())
