"""Command-line interface.

Exit codes: 0 success, 1 golden mismatch, 2 malformed input, 3 precondition
violation, 4 method inapplicable.
"""

from __future__ import annotations

import argparse
import difflib
import json
import sys
from pathlib import Path
from typing import Any

from .conormal import all_generators, dim_report
from .cycle import (
    Cycle,
    DimensionGateFailure,
    MultiplicityTable,
    NondegeneracyFailure,
    cc_gkz,
    cc_via_resolution,
    umbrella,
)
from .fan import GenerableSet, ResolutionError, default_complete_fan, is_complete, resolve
from .matrix import (
    CharacterVector,
    IntMatrix,
    PreconditionError,
    column_submatrix,
    hat,
    is_non_confluent,
    is_p_nondegenerate,
    rank_mod_p,
    rank_rational,
    require_prime,
    square_reduce,
    theta_subsets,
)

EXIT_OK, EXIT_GOLDEN, EXIT_MALFORMED, EXIT_PRECONDITION, EXIT_INAPPLICABLE = 0, 1, 2, 3, 4

GOLDEN_DIR = Path(__file__).with_name("golden")


class Malformed(Exception):
    """Input could not be parsed into the expected shape."""


# -- config -------------------------------------------------------------------

def _json_arg(value: Any, what: str) -> Any:
    """Parse a flag value that is either a JSON literal or a path to a JSON file."""
    if not isinstance(value, str):
        return value
    text = value
    path = Path(value)
    if not value.lstrip().startswith(("[", "{")) and path.is_file():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise Malformed(f"{what}: invalid JSON ({exc})") from None


def _matrix(cfg: dict) -> tuple[IntMatrix, bool]:
    if cfg.get("matrix") is None:
        raise Malformed("a matrix is required (--matrix or config key 'matrix')")
    try:
        M = IntMatrix.from_json(_json_arg(cfg["matrix"], "matrix"))
    except PreconditionError as exc:
        raise Malformed(f"matrix: {exc}") from None
    return M, bool(cfg.get("hatted"))


def _as_hat(cfg: dict) -> tuple[IntMatrix, IntMatrix | None]:
    """(A, B): A always, B when the input is unhatted or A is standard."""
    M, hatted = _matrix(cfg)
    if not hatted:
        return hat(M), M
    if M.nrows >= 2 and all(x == 1 for x in M.rows[0]):
        return M, IntMatrix(M.rows[1:])
    return M, None


def _prime(cfg: dict, required: bool) -> int | None:
    p = cfg.get("prime")
    if p is None:
        if required:
            raise Malformed("a prime is required (--prime)")
        return None
    if isinstance(p, str):
        try:
            p = int(p)
        except ValueError:
            raise Malformed(f"prime {p!r} is not an integer") from None
    if not isinstance(p, int) or isinstance(p, bool):
        raise Malformed(f"prime {p!r} is not an integer")
    require_prime(p)
    return p


def _character(cfg: dict) -> CharacterVector:
    raw = cfg.get("char")
    if raw is None:
        raise Malformed("a character is required (--char)")
    data = _json_arg(raw, "char")
    if isinstance(data, list):
        data = {"exponents": data, "order": cfg.get("order")}
    if not isinstance(data, dict) or not isinstance(data.get("exponents"), list):
        raise Malformed('character must be {"order": int, "exponents": [int, ...]}')
    order = data.get("order")
    if isinstance(order, str) and order.isdigit():
        order = int(order)
    if not isinstance(order, int) or not all(isinstance(e, int) for e in data["exponents"]):
        raise Malformed("character order and exponents must be integers")
    return CharacterVector(order, tuple(data["exponents"]))


def _theta(cfg: dict) -> tuple[int, ...]:
    raw = cfg.get("theta")
    if raw is None:
        raise Malformed("theta is required (--theta)")
    data = _json_arg(raw, "theta")
    if not isinstance(data, list) or not all(isinstance(j, int) for j in data):
        raise Malformed("theta must be a list of column indices")
    return tuple(data)


def _fan(cfg: dict, d: int) -> GenerableSet:
    if cfg.get("fan") is None:
        return default_complete_fan(d)
    data = _json_arg(cfg["fan"], "fan")
    if not isinstance(data, dict):
        raise Malformed("fan must be a JSON object {d, cones}")
    return GenerableSet.from_json(data)


# -- commands -----------------------------------------------------------------

def cmd_analyze(cfg: dict) -> dict:
    A, B = _as_hat(cfg)
    p = _prime(cfg, required=False)
    ok, P = is_non_confluent(A)
    out: dict = {"A": A.tolist(), "non_confluent": ok, "P": P.tolist() if P else None}
    if p is None:
        return out
    table = []
    for theta in theta_subsets(A.ncols):
        sub = column_submatrix(A, theta)
        r, rp = rank_rational(sub), rank_mod_p(sub, p)
        table.append({"theta": list(theta), "rank": r, "rank_p": rp, "ok": r == rp})
    good, failing = is_p_nondegenerate(A, p)
    out["p"] = p
    out["p_nondegenerate"] = good
    out["failing"] = [list(t) for t in failing]
    out["table"] = table
    if not good and A.nrows == A.ncols and rank_rational(A) == A.nrows:
        _, transcript = square_reduce(A, p)
        out["square_reduction"] = transcript.to_json()
    return out


def cmd_resolve(cfg: dict) -> dict:
    B, hatted = _matrix(cfg)
    if hatted:
        raise Malformed("resolve works on the unhatted matrix B")
    fan = _fan(cfg, B.nrows)
    if not is_complete(fan):
        raise PreconditionError("starting fan is not complete: some facet is not shared by exactly two cones")
    final, records = resolve(B, fan)
    return {
        "B": B.tolist(),
        "fan": final.to_json(),
        "blowups": [r.to_json() for r in records],
        "mu_nu_log": [
            {"pair": list(r.pair), "before": list(r.before), "after": list(r.after)} for r in records
        ],
    }


def cmd_conormal(cfg: dict) -> dict:
    A, _ = _as_hat(cfg)
    theta = _theta(cfg)
    k = cfg.get("chart", 0)
    if not isinstance(k, int):
        raise Malformed("chart must be an integer")
    infinity = bool(cfg.get("infinity"))
    mode = cfg.get("char_mode")
    p = None if mode == "0" else _prime(cfg, required=mode == "p")
    gens = all_generators(A, theta, k, infinity)
    out: dict = {"A": A.tolist(), "theta": list(theta), "chart": k, "infinity": infinity}
    out["generators"] = {g.family: g.render() for g in gens}
    out["pretty"] = {g.family: g.render(unicode=True) for g in gens}
    out["dim"] = dim_report(A, theta, k, p).to_json() if theta else None
    return out


def cmd_umbrella(cfg: dict) -> dict:
    A, _ = _as_hat(cfg)
    return {"A": A.tolist(), "umbrella": [list(t) for t in umbrella(A)]}


def cmd_cc(cfg: dict) -> dict:
    A, B = _as_hat(cfg)
    if B is None:
        raise PreconditionError("cc needs a standard matrix (first row all ones) or unhatted input")
    p = _prime(cfg, required=True)
    chi = _character(cfg)
    mult = None
    if cfg.get("mult") is not None:
        mult = MultiplicityTable.from_json(_json_arg(cfg["mult"], "mult"))
    cycle, report = cc_gkz(B, p, chi, mult)
    out = {"cycle": cycle.to_json(), "report": report}
    if cfg.get("resolution"):
        support, trace = cc_via_resolution(B)
        out["support"] = support.to_json()
        out["resolution"] = {"blowups": len(trace["blowups"]), "fan": trace["fan"]}
    return out


# -- fixtures -----------------------------------------------------------------

def _fixture(B: list[int], p: int, chi: dict) -> dict:
    Bm = IntMatrix([B])
    A = hat(Bm)
    out: dict = {"B": [B], "p": p, "character": chi}
    out["analyze"] = cmd_analyze({"matrix": [B], "prime": p})
    tables = []
    for theta in theta_subsets(A.ncols):
        for k in range(A.ncols + 1):
            for inf in (False, True) if k else (False,):
                gens = all_generators(A, theta, k, inf)
                tables.append(
                    {
                        "theta": list(theta),
                        "chart": k,
                        "infinity": inf,
                        "generators": {g.family: g.render() for g in gens},
                        "dim_char0": dim_report(A, theta, k).dim_exact,
                        "dim_charp": dim_report(A, theta, k, p).to_json(),
                    }
                )
    out["conormal"] = tables
    out["umbrella"] = [list(t) for t in umbrella(A)]
    support, trace = cc_via_resolution(Bm)
    out["support"] = support.to_json()
    out["support_blowups"] = len(trace["blowups"])
    try:
        cycle, report = cc_gkz(Bm, p, CharacterVector(chi["order"], tuple(chi["exponents"])))
        out["cc"] = {"cycle": cycle.to_json(), "reduction": report["reduction"], "final": report["final"]}
    except NondegeneracyFailure as exc:
        out["cc"] = {"error": "NondegeneracyFailure", "message": str(exc), "excess": exc.excess}
    return out


FIXTURES = {
    "example_1": ([0, 0, 1], 7, {"order": 6, "exponents": [1, 1]}),
    "example_2": ([0, 5, 10], 5, {"order": 4, "exponents": [1, 0]}),
    "example_3": ([0, 1, 5], 5, {"order": 4, "exponents": [1, 0]}),
}


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def cmd_examples(golden_dir: Path, update: bool = False) -> tuple[int, str]:
    if not golden_dir.is_dir():
        if not update:
            raise Malformed(f"fixture directory {golden_dir} does not exist")
        golden_dir.mkdir(parents=True)
    lines, status = [], EXIT_OK
    for name, (B, p, chi) in FIXTURES.items():
        text = _dump(_fixture(B, p, chi))
        path = golden_dir / f"{name}.json"
        if update:
            path.write_text(text)
            lines.append(f"wrote {path}")
            continue
        old = path.read_text() if path.exists() else ""
        if old == text:
            lines.append(f"{name}: ok")
        else:
            status = EXIT_GOLDEN
            lines.append(f"{name}: MISMATCH")
            lines.extend(
                difflib.unified_diff(
                    old.splitlines(), text.splitlines(), str(path), f"{name} (regenerated)", lineterm=""
                )
            )
    return status, "\n".join(lines) + "\n"


# -- text rendering -----------------------------------------------------------

def _text(obj: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if isinstance(obj, dict):
        out = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                out.append(f"{pad}{k}:")
                out.extend(_text(v, indent + 1))
            else:
                out.append(f"{pad}{k}: {_scalar(v)}")
        return out
    if isinstance(obj, list):
        out = []
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                out.append(f"{pad}-")
                out.extend(_text(v, indent + 1))
            else:
                out.append(f"{pad}- {_scalar(v)}")
        return out
    return [pad + _scalar(obj)]


def _flat(v: Any) -> bool:
    return isinstance(v, list) and all(not isinstance(x, dict) for x in v) and len(json.dumps(v)) < 70


def _scalar(v: Any) -> str:
    if isinstance(v, str):
        return v
    return json.dumps(v, ensure_ascii=False)


def render(cmd: str, result: dict, fmt: str) -> str:
    if fmt == "json":
        return _dump(result)
    lines = _text(result)
    if cmd == "conormal" and result.get("dim"):
        d = result["dim"]
        lines.append(f"dim = {d['dim_exact']}")
    return "\n".join(lines) + "\n"


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gkzcc", description="Characteristic cycles of GKZ hypergeometric sheaves.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(sp, need_matrix=True):
        sp.add_argument("--config", help="JSON config file; flags override its keys")
        if need_matrix:
            sp.add_argument("--matrix", help="matrix as a JSON literal or file (unhatted B by default)")
            sp.add_argument("--hatted", action="store_true", default=None, help="matrix is already A = hat(B)")
        sp.add_argument("--out", help="write output to this file instead of stdout")
        sp.add_argument("--format", choices=("json", "text"), default=None)

    sp = sub.add_parser("analyze", help="non-confluence and p-nondegeneracy")
    common(sp)
    sp.add_argument("--prime", type=int)

    sp = sub.add_parser("resolve", help="resolve the divisor of B by standard blow-ups")
    common(sp)
    sp.add_argument("--fan", help="starting fan (JSON literal or file); default: orthant fan")

    sp = sub.add_parser("conormal", help="generators and dimension of S_k(A, theta)")
    common(sp)
    sp.add_argument("--theta", help="column subset, e.g. [1,2,3]")
    sp.add_argument("--chart", type=int)
    sp.add_argument("--infinity", action="store_true", default=None)
    sp.add_argument("--prime", type=int)
    sp.add_argument("--char", dest="char_mode", choices=("0", "p"), help="characteristic mode (default: p if --prime given)")

    sp = sub.add_parser("umbrella", help="the umbrella index set of A")
    common(sp)

    sp = sub.add_parser("cc", help="characteristic cycle over the umbrella")
    common(sp)
    sp.add_argument("--prime", type=int)
    sp.add_argument("--char", help='character: {"order": q-1, "exponents": [...]} or a list with --order')
    sp.add_argument("--order", type=int, help="character order when --char is a plain list")
    sp.add_argument("--mult", help='multiplicity table: [{"theta": [...], "mult": int}, ...]')
    sp.add_argument("--resolution", action="store_true", default=None, help="also report the resolution route")

    sp = sub.add_parser("examples", help="regenerate the worked examples and diff against golden files")
    sp.add_argument("--golden-dir", type=Path, default=GOLDEN_DIR)
    sp.add_argument("--update", action="store_true", help="rewrite the golden files")
    return ap


def _config(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise Malformed(f"config: {exc}") from None
        if not isinstance(cfg, dict):
            raise Malformed("config must be a JSON object")
    for key, val in vars(args).items():
        if key in ("cmd", "config") or val is None:
            continue
        cfg[key] = val
    return cfg


COMMANDS = {
    "analyze": cmd_analyze,
    "resolve": cmd_resolve,
    "conormal": cmd_conormal,
    "umbrella": cmd_umbrella,
    "cc": cmd_cc,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "examples":
            code, text = cmd_examples(args.golden_dir, args.update)
            sys.stdout.write(text)
            return code
        cfg = _config(args)
        result = COMMANDS[args.cmd](cfg)
        text = render(args.cmd, result, cfg.get("format") or "json")
        if cfg.get("out"):
            Path(cfg["out"]).write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except Malformed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (NondegeneracyFailure, DimensionGateFailure, ResolutionError) as exc:
        print(f"method inapplicable: {exc}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
