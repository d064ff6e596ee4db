"""Command-line front end.

Every command prints a JSON report to stdout (or ``--out``) and a short
summary to stderr. Exit codes: 0 all passed, 2 bad input, 3 a precondition
failed, 4 a verification was violated.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import (
    Circuit,
    CircuitError,
    effective_support_A,
    effective_support_B,
    is_geometric,
    geometric_locality,
    light_cone,
    load_circuit,
    random_clifford_circuit,
)
from .code import (
    appendix_a_hamiltonian,
    code_state_encoder,
    css_encoder,
    stabilizing_candidates,
    surface_generators,
    verify_comut_op,
    verify_large_B,
)
from .complex import ComplexError, EdgeSet, PolygonalComplex, dumps_complex, load_complex, require_csc, validate_csc
from .dense import energy_direct, energy_from_rdms, history_overlap, random_local_hamiltonian, random_state
from .fixtures import FIXTURE_SIZES, fixture_key, load_fixture
from .metric import ball_size_bounds, degrees, diameter, shortest_path
from .suite import CRITERIA, run_criterion
from .tableau import run_circuit
from .topology import (
    PreconditionError,
    class_member_avoiding,
    connected_boundary_check,
    detour_path,
    homology,
    is_gamma_separating,
    r_simply_connected,
    reduce_to_connected_separator,
)

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_VIOLATION = 0, 2, 3, 4


class InputError(Exception):
    pass


class Precondition(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _complex_from_args(args) -> tuple[PolygonalComplex, dict]:
    if args.file:
        try:
            g = load_complex(args.file)
        except (ComplexError, OSError) as exc:
            raise InputError(str(exc)) from exc
        return g, {"file": Path(args.file).name, "complex": json.loads(dumps_complex(g))}
    if not args.fixture:
        raise InputError("give --fixture or --file")
    try:
        key = fixture_key(args.fixture, args.n)
        g = load_fixture(args.fixture, args.n)
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    return g, {"fixture": key}


def _circuit_from_args(args, g: PolygonalComplex | None) -> tuple[Circuit, dict]:
    if getattr(args, "circuit", None):
        try:
            u = load_circuit(args.circuit)
        except (CircuitError, OSError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        return u, {"circuit": Path(args.circuit).name, "circuit_digest": _digest(u.to_dict())}
    if g is None:
        raise InputError("give --circuit")
    encoder = getattr(args, "encoder", "css")
    try:
        u = css_encoder(g) if encoder == "css" else code_state_encoder(g)
    except ComplexError as exc:
        raise Precondition(str(exc)) from exc
    return u, {"encoder": encoder}


def _check_edges(g: PolygonalComplex, edges: list[int], what: str) -> None:
    bad = [e for e in edges if not 0 <= e < g.n_edges]
    if bad:
        raise InputError(f"{what}: edge {bad[0]} out of range (edges={g.n_edges})")


def _gamma(args, g: PolygonalComplex, rng: random.Random) -> list[int]:
    if args.gamma:
        _check_edges(g, args.gamma, "--gamma")
        return args.gamma
    e, f = rng.sample(range(g.n_edges), 2)
    return shortest_path(g, e, f, "path")


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


def _sorted(s: EdgeSet) -> list[int]:
    return sorted(s)


# ---------------------------------------------------------------------------
# commands; each returns (results list, exit code)


def cmd_complex(args) -> tuple[list[dict], dict, int]:
    g, inputs = _complex_from_args(args)
    if args.action == "build":
        return [json.loads(dumps_complex(g))], inputs, EXIT_OK
    cert = validate_csc(g)
    if args.action == "validate":
        res = {"is_csc": cert.is_csc, "witness": list(cert.witness) if cert.witness else None}
        code = EXIT_VIOLATION if args.strict and not cert.is_csc else EXIT_OK
        res["status"] = "verified" if cert.is_csc else "violated"
        return [res], inputs, code
    deg, fdeg = degrees(g)
    stats = {
        "vertices": g.n_vertices,
        "edges": g.n_edges,
        "faces": g.n_faces,
        "euler": g.n_vertices - g.n_edges + g.n_faces,
        "is_csc": cert.is_csc,
        "deg": deg,
        "face_deg": fdeg,
        "connected": g.is_connected(),
    }
    if g.is_connected():
        stats["diameter"] = diameter(g, args.metric)
        stats["log_bound"] = round(ball_size_bounds(g, args.metric)["log_bound"], 12)
    return [stats], inputs, EXIT_OK


def cmd_homology(args):
    g, inputs = _complex_from_args(args)
    return [homology(g).to_dict()], inputs, EXIT_OK


def cmd_code(args):
    g, inputs = _complex_from_args(args)
    try:
        spec = surface_generators(g)
    except ComplexError as exc:
        raise Precondition(str(exc)) from exc
    res = {
        "qubits": spec.n,
        "generators": len(spec.generators),
        "rank": spec.rank,
        "logical_count": spec.logical_count,
        "code_dimension": spec.code_dimension,
    }
    if args.encoder:
        u, _ = _circuit_from_args(args, g)
        t = run_circuit(u)
        res["encoder"] = {
            "kind": args.encoder,
            "depth": u.depth,
            "gates": sum(1 for _ in u.gates()),
            "stabilized": all(t.stabilizes(p) for p in spec.generators),
            "geometric_locality": geometric_locality(u, g, args.metric),
        }
        if args.emit_circuit:
            Path(args.emit_circuit).write_text(json.dumps(u.to_dict()) + "\n", encoding="utf-8")
    return [res], inputs, EXIT_OK


def cmd_lightcone(args):
    g = None
    inputs: dict = {}
    if args.fixture or args.file:
        g, inputs = _complex_from_args(args)
    u, cin = _circuit_from_args(args, g)
    inputs.update(cin)
    edges = args.edges or []
    bad = [q for q in edges if not 0 <= q < u.n_qubits]
    if bad:
        raise InputError(f"--edges: qubit {bad[0]} out of range")
    cone = light_cone(u, EdgeSet.of(edges), args.direction)
    res = {"direction": args.direction, "edges": sorted(edges), "cone": _sorted(cone), "size": len(cone),
           "depth": u.depth, "locality": u.locality}
    if g is not None and args.radius is not None:
        res["geometric"] = is_geometric(u, g, args.radius, args.metric)
    return [res], inputs, EXIT_OK


def cmd_supports(args):
    g, inputs = _complex_from_args(args)
    rng = random.Random(args.seed)
    u, cin = _circuit_from_args(args, g)
    inputs.update(cin)
    if u.n_qubits != g.n_edges:
        raise InputError(f"circuit has {u.n_qubits} qubits, complex has {g.n_edges} edges")
    gamma = _gamma(args, g, rng)
    a = effective_support_A(g, u, gamma)
    b = effective_support_B(g, u, gamma, a)
    return [{"gamma": gamma, "A": _sorted(a), "B": _sorted(b), "size_A": len(a), "size_B": len(b)}], inputs, EXIT_OK


def cmd_separation(args):
    g, inputs = _complex_from_args(args)
    rng = random.Random(args.seed)
    gamma = _gamma(args, g, rng)
    x = args.edges or []
    _check_edges(g, x, "--edges")
    xs = EdgeSet.of(x)
    sep = is_gamma_separating(g, gamma, xs)
    res: dict = {"gamma": gamma, "x": sorted(x), "separating": sep}
    if sep:
        try:
            res["connected_separator"] = _sorted(reduce_to_connected_separator(g, gamma, xs))
        except ComplexError as exc:
            raise Precondition(str(exc)) from exc
    else:
        member = class_member_avoiding(g, gamma, xs)
        res["avoiding_member"] = _sorted(member.chain)
    code = EXIT_VIOLATION if args.strict and not sep else EXIT_OK
    return [res], inputs, code


def cmd_rsimple(args):
    g, inputs = _complex_from_args(args)
    if args.radius is None:
        raise InputError("--radius is required")
    try:
        require_csc(g)
    except ComplexError as exc:
        raise Precondition(str(exc)) from exc
    ok, witness = r_simply_connected(g, args.radius, args.reading)
    res = {"radius": args.radius, "reading": args.reading, "r_simply_connected": ok, "witness": witness}
    return [res], inputs, EXIT_VIOLATION if args.strict and not ok else EXIT_OK


def _verify_lemma(args, g: PolygonalComplex) -> list[dict]:
    rng = random.Random(args.seed)
    lemma = args.lemma
    out = []
    if lemma == "large-b":
        u, _ = _circuit_from_args(args, g)
        for _ in range(args.instances):
            gamma = _gamma(args, g, rng)
            e, f = gamma[0], gamma[-1]
            try:
                r = verify_large_B(g, u, gamma, e, f)
            except ValueError as exc:
                raise Precondition(str(exc)) from exc
            out.append({"gamma": gamma, "status": r.status, "member": _sorted(r.member) if r.member else None,
                        "size_A": r.size_A, "size_B": r.size_B, "distance": r.distance, "checks": r.checks})
    elif lemma == "comut-op":
        u, _ = _circuit_from_args(args, g)
        t = run_circuit(u)
        for _ in range(args.instances):
            gamma = _gamma(args, g, rng)
            b = effective_support_B(g, u, gamma)
            for p in stabilizing_candidates(g, b, rng, 4):
                r = verify_comut_op(g, u, gamma, p, t, b)
                out.append({"gamma": gamma, "P": p.label(), "status": r.status, "premise": r.premise})
    elif lemma == "get-around":
        if args.radius is None:
            raise InputError("--radius is required")
        for _ in range(args.instances):
            gamma = _gamma(args, g, rng)
            x0 = rng.randrange(g.n_edges)
            try:
                m = detour_path(g, gamma, x0, args.radius, edges_from=args.reading)
            except PreconditionError as exc:
                out.append({"gamma": gamma, "x0": x0, "status": "precondition", "premise": str(exc)})
                continue
            out.append({"gamma": gamma, "x0": x0, "status": "verified" if m else "violated",
                        "member": _sorted(m.chain) if m else None})
    elif lemma == "connected-boundary":
        if args.radius is None:
            raise InputError("--radius is required")
        for e in range(g.n_edges):
            r = connected_boundary_check(g, e, args.radius, args.reading)
            status = "precondition" if not r.precondition else ("verified" if r.connected else "violated")
            out.append({"e": e, "status": status, "reason": r.reason})
    return out


LEMMA_CRITERIA = {
    "structure": 1, "chain-complex": 2, "separation": 3, "effective-support": 4, "comut-op-suite": 5,
    "large-b-suite": 6, "containment": 7, "balls": 8, "get-around-suite": 9, "appendix-a": 10,
    "appendix-b": 11, "appendix-c": 12, "cross-engine": 13, "qecc": 14,
}
FIXTURE_LEMMAS = ("large-b", "comut-op", "get-around", "connected-boundary")


def _criterion_job(number_seed: tuple[int, int]) -> dict:
    number, seed = number_seed
    r = run_criterion(number, seed)
    return {**r.to_dict(), "status": "verified" if r.passed else "violated", "_seconds": r.seconds}


def cmd_verify(args):
    if args.lemma in FIXTURE_LEMMAS:
        g, inputs = _complex_from_args(args)
        try:
            require_csc(g)
        except ComplexError as exc:
            raise Precondition(str(exc)) from exc
        results = _verify_lemma(args, g)
        inputs.update({"lemma": args.lemma, "seed": args.seed})
    else:
        numbers = sorted(CRITERIA) if args.lemma == "all" else [LEMMA_CRITERIA[args.lemma]]
        jobs = [(k, args.seed) for k in numbers]
        if args.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_criterion_job, jobs))
        else:
            results = [_criterion_job(j) for j in jobs]
        for r in results:
            print(f"criterion {r['criterion']:2d} [{'PASS' if r['passed'] else 'FAIL'}] {r['name']} "
                  f"({r.pop('_seconds'):.1f}s)", file=sys.stderr)
        inputs = {"lemma": args.lemma, "seed": args.seed}
    code = EXIT_VIOLATION if any(r.get("status") == "violated" for r in results) else EXIT_OK
    return results, inputs, code


def cmd_appendix(args):
    rng = np.random.default_rng(args.seed)
    results = []
    if args.which == "a":
        if args.circuit:
            u, inputs = _circuit_from_args(args, None)
            circuits = [u]
        else:
            inputs = {}
            circuits = [random_clifford_circuit(args.n or 8, 2, rng) for _ in range(args.instances)]
        for u in circuits:
            h = appendix_a_hamiltonian(u)
            results.append({"qubits": u.n_qubits, "depth": u.depth, "locality": u.locality,
                            "terms": [p.label() for p in h.terms], "checks": h.checks,
                            "status": "verified" if h.ok else "violated"})
    elif args.which == "b":
        sizes = [args.n] if args.n else list(range(2, 7))
        inputs = {}
        for n in sizes:
            if n < 2 or n > 8:
                raise InputError("appendix b needs 2 <= n <= 8")
            got = history_overlap(n)
            want = (n * n - n) ** 0.5 / n
            results.append({"n": n, "overlap": round(got, 12), "expected": round(want, 12),
                            "status": "verified" if abs(got - want) < 1e-10 else "violated"})
    else:
        inputs = {}
        for _ in range(args.instances):
            n = int(rng.integers(3, 9))
            h = random_local_hamiltonian(n, 3, int(rng.integers(1, 12)), rng)
            s = random_state(n, rng)
            err = abs(energy_from_rdms(h, s) - energy_direct(h, s))
            results.append({"qubits": n, "terms": len(h.terms), "abs_error_below_1e-10": err < 1e-10,
                            "status": "verified" if err < 1e-10 else "violated"})
    inputs.update({"which": args.which, "seed": args.seed})
    code = EXIT_VIOLATION if any(r["status"] == "violated" for r in results) else EXIT_OK
    return results, inputs, code


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fixture", choices=sorted(FIXTURE_SIZES))
    common.add_argument("--n", type=int)
    common.add_argument("--file", help="complex JSON file")
    common.add_argument("--circuit", help="circuit JSON file")
    common.add_argument("--gamma", type=_int_list, help="edge walk, e.g. 0,4,9")
    common.add_argument("--edges", type=_int_list, help="edge set, e.g. 1,2,3")
    common.add_argument("--radius", type=int)
    common.add_argument("--metric", choices=("path", "copath"), default="copath")
    common.add_argument("--reading", choices=("vertices", "faces"), default="vertices",
                        help="edge set of K(e,r): edges at vertices of F' or edges of F'")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--strict", action="store_true", help="exit 4 on any negative outcome")

    p = argparse.ArgumentParser(prog="homdepth", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"homdepth {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("complex", parents=[common], help="build, validate or summarize a complex")
    c.add_argument("action", choices=("build", "validate", "stats"))
    c.set_defaults(func=cmd_complex)

    sub.add_parser("homology", parents=[common], help="Betti numbers and ranks").set_defaults(func=cmd_homology)

    c = sub.add_parser("code", parents=[common], help="surface-code parameters and optional encoder")
    c.add_argument("--encoder", choices=("css", "synth"))
    c.add_argument("--emit-circuit", help="write the encoder circuit JSON here")
    c.set_defaults(func=cmd_code)

    c = sub.add_parser("lightcone", parents=[common], help="light cone of an edge set")
    c.add_argument("--direction", choices=("up", "down"), default="up")
    c.add_argument("--encoder", choices=("css", "synth"), default="css")
    c.set_defaults(func=cmd_lightcone)

    c = sub.add_parser("supports", parents=[common], help="effective supports A and B")
    c.add_argument("--encoder", choices=("css", "synth"), default="css")
    c.set_defaults(func=cmd_supports)

    sub.add_parser("separation", parents=[common], help="decide gamma-separation").set_defaults(func=cmd_separation)
    sub.add_parser("rsimple", parents=[common], help="r-simple connectedness").set_defaults(func=cmd_rsimple)

    c = sub.add_parser("verify", parents=[common], help="run a lemma check or the acceptance matrix")
    c.add_argument("lemma", choices=("all", *FIXTURE_LEMMAS, *LEMMA_CRITERIA))
    c.add_argument("--encoder", choices=("css", "synth"), default="css")
    c.add_argument("--instances", type=int, default=5)
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("appendix", parents=[common], help="appendix constructions")
    c.add_argument("which", choices=("a", "b", "c"))
    c.add_argument("--instances", type=int, default=10)
    c.set_defaults(func=cmd_appendix)
    return p


def _summary(results: list[dict]) -> dict:
    statuses = [r.get("status") for r in results]
    return {"passed": sum(s == "verified" for s in statuses), "failed": sum(s == "violated" for s in statuses),
            "preconditions": sum(s == "precondition" for s in statuses)}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        results, inputs, code = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (Precondition, PreconditionError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    report = {
        "command": args.command,
        "inputs": inputs,
        "inputs_digest": _digest(inputs),
        "results": results,
        **_summary(results),
    }
    text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    s = _summary(results)
    print(f"{args.command}: {len(results)} result(s), {s['passed']} verified, {s['failed']} violated, "
          f"{s['preconditions']} precondition; exit {code}; {time.perf_counter() - start:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
