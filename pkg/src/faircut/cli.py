"""Command-line front end. Every subcommand prints one JSON document."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .config import DEFAULT, get_logger
from .expander import expander_decomposition
from .fair_cut import fair_cut
from .flows import FLOAT_SLACK, Refuted, check_fair_witness, verify_one_sided_fair
from .ghtree import gh_tree
from .graph import Graph, GraphError, cut_value
from .io import parse_graph
from .isolating import isolating_cuts, steiner_mincut

log = get_logger(__name__)

EXIT_OK, EXIT_ERROR, EXIT_REFUTED = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    source: int | None = None
    sink: int | None = None
    alpha: float = 0.5
    epsilon: float = 0.2
    phi: float = 0.05
    terminals: list | None = None
    seed: int = 0
    strict: bool | None = None
    output: str | None = None
    rounds: int | None = None
    overrides: dict = field(default_factory=dict)


def _graph_json(g):
    return {"n": g.n, "edges": [[u + 1, v + 1, c] for u, v, c in g.edges()]}


def _graph_from_json(obj):
    edges = [(int(u) - 1, int(v) - 1, float(c)) for u, v, c in obj["edges"]]
    return Graph.from_edges(int(obj["n"]), edges)


def _ones(vs):
    return sorted(int(v) + 1 for v in vs)


def _value_json(x):
    return str(x) if isinstance(x, Fraction) else float(x)


def _terminals(cfg, g):
    if not cfg.terminals:
        raise GraphError("--terminals is required")
    out = []
    for v in cfg.terminals:
        if not 1 <= v <= g.n:
            raise GraphError(f"terminal {v} out of range 1..{g.n}")
        out.append(v - 1)
    return sorted(set(out))


def _run_faircut(cfg, g, constants):
    if cfg.source is None or cfg.sink is None:
        raise GraphError("faircut needs -s and -t")
    s, t = cfg.source - 1, cfg.sink - 1
    for v in (s, t):
        if not 0 <= v < g.n:
            raise GraphError("source or sink out of range")
    if not 0 < cfg.alpha <= 1:
        raise GraphError("alpha must lie in (0, 1]")
    cut, cert = fair_cut(g, s, t, cfg.alpha, seed=cfg.seed, constants=constants, strict=cfg.strict)
    result = {"side": _ones(cut.side), "value": cut.value, "s": cfg.source, "t": cfg.sink, "alpha": cfg.alpha}
    certificate = {
        "kind": "fair-cut",
        "graph": _graph_json(g),
        "s": cfg.source,
        "t": cfg.sink,
        "alpha": 1 + cfg.alpha,
        "side": _ones(cut.side),
        "witness": [_value_json(x) for x in cert.witness.values],
        "slack": 0 if cert.witness.is_exact else 10 * FLOAT_SLACK,
    }
    return result, certificate


def _run_isocut(cfg, g, constants):
    terms = _terminals(cfg, g)
    res = isolating_cuts(g, terms, cfg.epsilon, seed=cfg.seed, constants=constants, strict=cfg.strict)
    cuts = [{"terminal": t + 1, "side": _ones(c.side), "value": c.value} for t, c in sorted(res.cuts.items())]
    result = {"terminals": [t + 1 for t in terms], "epsilon": cfg.epsilon, "gamma": res.gamma, "cuts": cuts}
    certificate = {"kind": "isolating-cuts", "graph": _graph_json(g), "alpha": 1 + res.gamma, "cuts": cuts}
    return result, certificate


def _run_steiner(cfg, g, constants):
    terms = _terminals(cfg, g)
    cut = steiner_mincut(g, terms, cfg.epsilon, seed=cfg.seed, constants=constants, strict=cfg.strict)
    return {"terminals": [t + 1 for t in terms], "side": _ones(cut.side), "value": cut.value}, None


def _run_ghtree(cfg, g, constants):
    terms = _terminals(cfg, g) if cfg.terminals else list(range(g.n))
    tree = gh_tree(g, terms, cfg.epsilon, seed=cfg.seed, constants=constants, rounds=cfg.rounds,
                   strict=cfg.strict)
    result = {
        "terminals": [t + 1 for t in tree.terminals],
        "edges": [[a + 1, b + 1, w] for a, b, w in sorted(tree.edges)],
        "mapping": [[v + 1, int(f) + 1] for v, f in enumerate(tree.mapping.tolist())],
    }
    return result, None


def _run_expdecomp(cfg, g, constants):
    part = expander_decomposition(g, cfg.phi, seed=cfg.seed, constants=constants,
                                  strict=bool(cfg.strict))
    result = {
        "parts": [_ones(p) for p in part.parts],
        "crossing_weight": part.crossing_weight,
        "certificates": part.certificates,
    }
    return result, None


def _verify(doc):
    cert = doc.get("certificate", doc)
    if not isinstance(cert, dict) or "kind" not in cert:
        raise GraphError("no certificate found")
    g = _graph_from_json(cert["graph"])
    alpha = Fraction(str(cert["alpha"]))
    if cert["kind"] == "fair-cut":
        vals = [Fraction(str(x)) for x in cert["witness"]]
        side = [v - 1 for v in cert["side"]]
        slack = Fraction(str(cert.get("slack", 0)))
        problems = check_fair_witness(g, cert["s"] - 1, cert["t"] - 1, side, alpha, vals, slack)
        return {"kind": "fair-cut", "valid": not problems, "problems": problems}
    if cert["kind"] == "isolating-cuts":
        problems, seen = [], set()
        for c in cert["cuts"]:
            side = [v - 1 for v in c["side"]]
            if seen & set(side):
                problems.append(f"cut of terminal {c['terminal']} overlaps another")
            seen |= set(side)
            if cut_value(g, side) != c["value"]:
                problems.append(f"cut of terminal {c['terminal']} has a wrong value")
            if isinstance(verify_one_sided_fair(g, c["terminal"] - 1, side, float(alpha)), Refuted):
                problems.append(f"cut of terminal {c['terminal']} is not one-sided fair")
        return {"kind": "isolating-cuts", "valid": not problems, "problems": problems}
    raise GraphError(f"unknown certificate kind {cert['kind']!r}")


RUNNERS = {
    "faircut": _run_faircut,
    "isocut": _run_isocut,
    "steiner": _run_steiner,
    "ghtree": _run_ghtree,
    "expdecomp": _run_expdecomp,
}


def run(cfg):
    """Execute one configuration. Returns ``(exit_code, payload)``."""
    start = time.perf_counter()
    try:
        constants = DEFAULT.with_overrides(cfg.overrides)
        if cfg.command == "verify":
            doc = json.loads(Path(cfg.input).read_text())
            report = _verify(doc)
            payload = {"result": report, "seed": cfg.seed, "constants_used": constants.as_dict()}
            code = EXIT_OK if report["valid"] else EXIT_REFUTED
        else:
            text = sys.stdin.read() if cfg.input in (None, "-") else Path(cfg.input).read_text()
            g = parse_graph(text)
            result, certificate = RUNNERS[cfg.command](cfg, g, constants)
            payload = {"result": result}
            if certificate is not None:
                payload["certificate"] = certificate
            payload.update({"seed": cfg.seed, "constants_used": constants.as_dict()})
            code = EXIT_OK
    except (GraphError, ValueError, KeyError, OSError, json.JSONDecodeError) as err:
        return EXIT_ERROR, {"error": str(err)}
    except (RuntimeError, AssertionError) as err:
        log.error("run failed: %s", err)
        return EXIT_ERROR, {"error": f"{type(err).__name__}: {err}"}
    payload["wall_time_ms"] = round((time.perf_counter() - start) * 1000, 3)
    return code, payload


def _int_list(text):
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    return [int(x) for x in text.replace(",", " ").split()]


def _override(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected NAME=VALUE")
    return key.strip(), value.strip()


def build_parser():
    p = argparse.ArgumentParser(prog="cut-tool", description="Fair cuts and the cut algorithms built on them.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", "-o")
    common.add_argument("--set", dest="overrides", type=_override, action="append", default=[],
                        metavar="NAME=VALUE", help="override a tuning constant")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_const", const=True)
    mode.add_argument("--float", dest="strict", action="store_const", const=False)
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("faircut", parents=[common], help="approximately fair (s,t)-cut")
    f.add_argument("input")
    f.add_argument("-s", dest="source", type=int, required=True)
    f.add_argument("-t", dest="sink", type=int, required=True)
    f.add_argument("--alpha", type=float, default=0.5)
    for name, helptext in (("isocut", "approximate minimum isolating cuts"),
                           ("steiner", "approximate Steiner mincut"),
                           ("ghtree", "approximate Gomory-Hu Steiner tree")):
        q = sub.add_parser(name, parents=[common], help=helptext)
        q.add_argument("input")
        q.add_argument("--terminals", type=_int_list, required=name != "ghtree",
                       help="comma separated, or @file")
        q.add_argument("--epsilon", type=float, default=0.2)
        if name == "ghtree":
            q.add_argument("--rounds", type=int)
    e = sub.add_parser("expdecomp", parents=[common], help="expander decomposition")
    e.add_argument("input")
    e.add_argument("--phi", type=float, default=0.05)
    v = sub.add_parser("verify", parents=[common], help="check a certificate file")
    v.add_argument("input")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        input=args.input,
        source=getattr(args, "source", None),
        sink=getattr(args, "sink", None),
        alpha=getattr(args, "alpha", 0.5),
        epsilon=getattr(args, "epsilon", 0.2),
        phi=getattr(args, "phi", 0.05),
        terminals=getattr(args, "terminals", None),
        seed=args.seed,
        strict=args.strict,
        output=args.output,
        rounds=getattr(args, "rounds", None),
        overrides=dict(args.overrides),
    )
    code, payload = run(cfg)
    text = json.dumps(payload, indent=1, default=_json_default)
    if "error" in payload:
        print(text, file=sys.stderr)
    elif cfg.output:
        Path(cfg.output).write_text(text + "\n")
    else:
        print(text)
    return code


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


if __name__ == "__main__":
    sys.exit(main())
