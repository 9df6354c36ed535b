"""Command-line front end: generation, analysis, election, verification.

Every subcommand prints one JSON document on stdout whose "config" field is
enough to reproduce the run.  Exit codes: 0 success, 1 a violation or
validation failure (including structural-property violations), 2 usage or
malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import advice as advice_mod
from . import family_g, family_j, family_u, report, sim, tasks, trees
from .graph import GraphError, parse_plg, serialize_plg
from .views import build_view, canonical_encoding, refine_classes

USAGE_ERRORS = (
    trees.ParamOutOfRangeError,
    trees.BadSequenceError,
    trees.SizeGuardError,
    GraphError,
    ValueError,
)
VIOLATION_ERRORS = (
    trees.LemmaViolationError,
    trees.NotAFamilyInstanceError,
    tasks.InfeasibleError,
    tasks.MaxKExceededError,
    tasks.BudgetExceededError,
    family_j.DecodeAmbiguityError,
    advice_mod.NoCollisionError,
)


def _emit(doc: dict, args) -> None:
    if not getattr(args, "deterministic", False):
        doc["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    print(json.dumps(doc, indent=2, sort_keys=True))


def _config(args, keys) -> dict:
    return {"command": args.command, **{k: getattr(args, k) for k in keys}}


def _load_graph(path: str):
    with open(path, "r", encoding="ascii") as fh:
        return parse_plg(fh.read())


def _parse_sigma(text: str, count: int, delta: int) -> tuple[int, ...]:
    if text.startswith("all:"):
        return tuple([int(text[4:])] * count)
    values = tuple(int(x) for x in text.split(","))
    if len(values) != count:
        raise trees.BadSequenceError(f"sigma needs {count} entries, got {len(values)}")
    return values


def _parse_y(text: str, half: int) -> tuple[int, ...]:
    if text.startswith("all:"):
        return tuple([int(text[4:])] * half)
    if text.startswith("onehot:"):
        idx = int(text[7:])
        return tuple(1 if i == idx else 0 for i in range(half))
    if len(text) != half or set(text) - {"0", "1"}:
        raise trees.BadSequenceError(f"y must be {half} bits of 0/1")
    return tuple(int(c) for c in text)


def cmd_gen(args) -> int:
    if args.family == "g":
        inst = family_g.build_instance(args.delta, args.k, args.i)
    elif args.family == "u":
        count = trees.tree_class_size(args.delta, args.k)
        sigma = _parse_sigma(args.sigma, count, args.delta)
        inst = family_u.build_instance(args.delta, args.k, sigma)
    else:
        half = 1 << (family_j.border_width(args.mu, args.k) - 1)
        inst = family_j.build_instance(args.mu, args.k, _parse_y(args.y, half))
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write(serialize_plg(inst.graph))
    sidecar_path = args.sidecar or args.out + ".json"
    with open(sidecar_path, "w", encoding="ascii") as fh:
        fh.write(inst.sidecar_json())
    _emit(
        {
            "config": _config(args, ["family", "out"]),
            "nodes": inst.graph.n,
            "edges": inst.graph.edge_count,
            "max_degree": inst.graph.max_degree,
            "plg": args.out,
            "sidecar": sidecar_path,
        },
        args,
    )
    return 0


def cmd_views(args) -> int:
    g = _load_graph(args.graph)
    nodes = [args.node] if args.node is not None else list(range(g.n))
    entries = []
    for v in nodes:
        view = build_view(g, v, args.depth)
        entries.append(
            {
                "node": v,
                "degree": g.degree(v),
                "view_nodes": view.node_count(),
                "encoding_hex": canonical_encoding(view).hex(),
            }
        )
    _emit(
        {"config": _config(args, ["graph", "depth", "node"]), "views": entries},
        args,
    )
    return 0


def cmd_classes(args) -> int:
    g = _load_graph(args.graph)
    part = refine_classes(g, args.depth)
    _emit(
        {
            "config": _config(args, ["graph", "depth"]),
            "class_ids": [list(part.at(d)) for d in range(args.depth + 1)],
            "class_counts": [part.num_classes(d) for d in range(args.depth + 1)],
            "singletons": [sorted(part.singletons(d)) for d in range(args.depth + 1)],
        },
        args,
    )
    return 0


def cmd_index(args) -> int:
    g = _load_graph(args.graph)
    rep = tasks.z_index_bruteforce(g, args.task, max_k=args.max_k, budget=args.budget)
    _emit({"config": _config(args, ["graph", "task", "max_k", "budget"]), **rep.to_dict()}, args)
    return 0


def cmd_elect(args) -> int:
    g = _load_graph(args.graph)
    doc: dict = {"config": _config(args, ["graph", "task", "scheme"])}
    if args.scheme == "bruteforce":
        rep = tasks.z_index_bruteforce(g, args.task, max_k=args.max_k, budget=args.budget)
        outputs = list(rep.outputs)
        doc.update({"k": rep.k, "leader": rep.leader, "advice_bits": 0})
        bad = tasks.validate_outputs(g, args.task, outputs)
    else:
        if args.scheme == "selection":
            scheme = advice_mod.selection_scheme()
        elif args.scheme == "pe-map":
            scheme = advice_mod.pe_map_scheme(args.delta, args.k)
        else:
            scheme = advice_mod.cppe_map_scheme(args.mu, args.k)
        if scheme.task != args.task:
            raise ValueError(f"scheme {args.scheme} solves task {scheme.task}, not {args.task}")
        adv = scheme.oracle(g)
        program = scheme.make_program(adv)
        if args.advice_out:
            advice_mod.write_advice_file(args.advice_out, adv)
        if args.scheme == "cppe-map" and not args.full_outputs:
            inst = family_j.recover_instance(g, args.mu, args.k)
            wanted = family_j.sample_nodes(inst, seed=args.seed)
            result = sim.run(g, program, adv, nodes=wanted)
            leader = [v for v, o in result.outputs.items() if o == tasks.LEADER]
            doc.update(
                {
                    "k": program.rounds,
                    "advice_bits": adv.bits,
                    "sampled_nodes": len(wanted),
                    "leader": leader[0] if len(leader) == 1 else None,
                }
            )
            bad = None
            if len(leader) != 1:
                bad = tasks.Violation("no-leader" if not leader else "multiple-leaders")
            else:
                for v in wanted:
                    if v == leader[0]:
                        continue
                    bad = tasks.check_path_output(g, v, result.outputs[v], leader[0], args.task)
                    if bad is not None:
                        break
            doc["valid"] = bad is None
            if bad is not None:
                doc["violation"] = bad.__dict__
            _emit(doc, args)
            return 0 if bad is None else 1
        result = sim.run(g, program, adv)
        outputs = [result.outputs[v] for v in range(g.n)]
        leaders = [v for v in range(g.n) if outputs[v] == tasks.LEADER]
        doc.update(
            {
                "k": program.rounds,
                "advice_bits": adv.bits,
                "leader": leaders[0] if len(leaders) == 1 else None,
            }
        )
        bad = tasks.validate_outputs(g, args.task, outputs)
    doc["valid"] = bad is None
    if bad is not None:
        doc["violation"] = bad.__dict__
    if g.n <= args.max_output_nodes or args.full_outputs:
        doc["outputs"] = [tasks._output_json(o) for o in outputs]
    _emit(doc, args)
    return 0 if bad is None else 1


def _verify_g_one(job) -> dict:
    delta, k, i = job
    rep = family_g.check_lemmas(delta, k, indices=[i], pairs=[])
    return {"instance": i, "extra_singletons": rep.to_dict()["extra_singletons"]}


def cmd_verify(args) -> int:
    lemmas = None
    if args.lemmas != "all":
        lemmas = frozenset(args.lemmas.split(","))
    doc: dict = {"config": _config(args, ["family", "lemmas", "seed", "jobs"])}
    fooling = lemmas is None or "fooling" in (lemmas or set())
    if lemmas is not None:
        lemmas = lemmas - {"fooling"}

    if args.family == "g":
        indices = None
        if args.indices:
            indices = [int(x) for x in args.indices.split(",")]
        if args.jobs > 1 and indices and (lemmas is None or lemmas):
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                per = list(pool.map(_verify_g_one, [(args.delta, args.k, i) for i in indices]))
            rep = family_g.check_lemmas(
                args.delta, args.k, indices=indices,
                lemmas=frozenset({"cross"}) if lemmas is None else (lemmas & {"cross"}),
            )
            doc["report"] = rep.to_dict()
            doc["per_instance"] = sorted(per, key=lambda d: d["instance"])
        else:
            rep = family_g.check_lemmas(args.delta, args.k, indices=indices, lemmas=lemmas)
            doc["report"] = rep.to_dict()
        if fooling:
            doc["fooling"] = advice_mod.fooling_demo(
                "g", {"delta": args.delta, "k": args.k}
            ).to_dict()
    elif args.family == "u":
        ulemmas = None if lemmas is None else (lemmas | {"fooling"} if fooling else lemmas)
        rep = family_u.check_lemmas(args.delta, args.k, lemmas=ulemmas)
        doc["report"] = rep.to_dict()
    else:
        rep = family_j.check_lemmas(
            args.mu,
            args.k,
            seed=args.seed,
            full_validate=args.full_validate,
            lemmas=lemmas,
        )
        doc["report"] = rep.to_dict()
        if fooling:
            doc["fooling"] = advice_mod.fooling_demo(
                "j", {"mu": args.mu, "k": args.k}
            ).to_dict()
    _emit(doc, args)
    return 0


def cmd_count(args) -> int:
    if args.family == "g":
        count = family_g.class_size(args.delta, args.k)
    elif args.family == "u":
        count = family_u.class_size(args.delta, args.k)
    else:
        count = family_j.class_size(args.mu, args.k)
    _emit({"config": _config(args, ["family"]), "count": count}, args)
    return 0


def cmd_budget(args) -> int:
    if args.family == "g":
        count = family_g.class_size(args.delta, args.k)
    elif args.family == "u":
        count = family_u.class_size(args.delta, args.k)
    else:
        count = family_j.class_size(args.mu, args.k)
    _emit(
        {
            "config": _config(args, ["family"]),
            "class_count_bits": count.bit_length(),
            "pigeonhole_budget": advice_mod.pigeonhole_budget(count),
        },
        args,
    )
    return 0


def cmd_report(args) -> int:
    g = _load_graph(args.graph)
    summary = report.write_report(
        g, args.out_dir, depth=args.depth, name=args.name, seed=args.seed
    )
    _emit({"config": _config(args, ["graph", "out_dir", "depth"]), **summary}, args)
    return 0


def _add_family_params(p: argparse.ArgumentParser, with_instance: bool = True) -> None:
    p.add_argument("--family", required=True, choices=["g", "u", "j"])
    p.add_argument("--delta", type=int, help="families g and u")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mu", type=int, help="family j")
    if with_instance:
        p.add_argument("--i", type=int, help="family g instance index (1-based)")
        p.add_argument("--sigma", help="family u swaps: 'all:<s>' or comma list")
        p.add_argument("--y", help="family j bits: 'all:<b>', 'onehot:<i>', or a bit string")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="portelect",
        description="Leader election in anonymous port-labeled networks",
    )
    parser.add_argument(
        "--deterministic", action="store_true", help="omit the timestamp field"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a family instance (PLG + JSON sidecar)")
    _add_family_params(p)
    p.add_argument("--out", required=True)
    p.add_argument("--sidecar", help="default: <out>.json")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("views", help="canonical view encodings at a depth")
    p.add_argument("--graph", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--node", type=int)
    p.set_defaults(fn=cmd_views)

    p = sub.add_parser("classes", help="view-equivalence classes per depth")
    p.add_argument("--graph", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(fn=cmd_classes)

    p = sub.add_parser("index", help="election index by brute force")
    p.add_argument("--graph", required=True)
    p.add_argument("--task", required=True, choices=list(tasks.TASKS))
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--budget", type=int, default=5_000_000)
    p.set_defaults(fn=cmd_index)

    p = sub.add_parser("elect", help="run an election scheme and validate")
    p.add_argument("--graph", required=True)
    p.add_argument("--task", required=True, choices=list(tasks.TASKS))
    p.add_argument(
        "--scheme", required=True, choices=["bruteforce", "selection", "pe-map", "cppe-map"]
    )
    p.add_argument("--delta", type=int, help="pe-map")
    p.add_argument("--k", type=int, help="pe-map / cppe-map")
    p.add_argument("--mu", type=int, help="cppe-map")
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--budget", type=int, default=5_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--advice-out", help="write the advice string to a file")
    p.add_argument("--full-outputs", action="store_true")
    p.add_argument("--max-output-nodes", type=int, default=2000)
    p.set_defaults(fn=cmd_elect)

    p = sub.add_parser("verify", help="verify structural properties of a family")
    _add_family_params(p, with_instance=False)
    p.add_argument("--lemmas", default="all", help="comma list, or 'all'")
    p.add_argument("--indices", help="family g: comma list of instance indices")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--full-validate", action="store_true")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("count", help="class size (exact big integer)")
    _add_family_params(p, with_instance=False)
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("budget", help="pigeonhole advice-length threshold")
    _add_family_params(p, with_instance=False)
    p.set_defaults(fn=cmd_budget)

    p = sub.add_parser("report", help="CSV summaries and figures for a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--name", default="graph")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_report)

    return parser


def _check_family_args(parser, args) -> None:
    if getattr(args, "family", None) in ("g", "u") and args.delta is None:
        parser.error(f"family {args.family} needs --delta")
    if getattr(args, "family", None) == "j" and args.mu is None:
        parser.error("family j needs --mu")
    if getattr(args, "family", None) == "g" and getattr(args, "i", "skip") is None:
        parser.error("family g needs --i")
    if getattr(args, "family", None) == "u" and getattr(args, "sigma", "skip") is None:
        parser.error("family u needs --sigma")
    if getattr(args, "family", None) == "j" and getattr(args, "y", "skip") is None:
        parser.error("family j needs --y")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _check_family_args(parser, args)
    try:
        return args.fn(args)
    except VIOLATION_ERRORS as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), file=sys.stderr)
        return 1
    except USAGE_ERRORS as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
