"""``qcov`` command-line front end.

Every subcommand prints a short human summary on stdout and can write a
machine-readable run report (``--out``, or ``--json`` for stdout).  Reports
use sorted keys so identical inputs and seed give identical bytes.

Exit codes: 0 when a verdict was computed (also a negative one), 1 for
malformed input, 2 when a cap was hit or a search stayed undecided.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg as la
from .covering import BoundQuiverMorphism, is_relation_covering, verify_quotient_covering_dims
from .errors import InputError, LiftError, Refusal
from .group import ActionPresentation, galois_over_subgroups, is_galois_covering, orbit_quiver
from .pi1 import fundamental_group, simply_connected_criterion
from .quiver import Quiver, QuiverMorphism, is_quiver_covering
from .relations import IdealPresentation
from .reps import Representation, are_isomorphic, hom_basis, is_indecomposable, pull_up, push_down
from .reptype import representation_type
from .strings import band_module, enumerate_bands, enumerate_strings, is_band, is_string_presentation
from .universal_cover import build_universal_cover, deck_action

EXIT_OK, EXIT_INPUT, EXIT_REFUSAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; here a bad command line is an input error."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# input handling ------------------------------------------------------------------------


class Inputs:
    def __init__(self):
        self.files: Dict[str, dict] = {}

    def load(self, role: str, path: str):
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise InputError(f"{path}: cannot read ({exc.strerror})") from None
        self.files[role] = {"path": path, "sha256": hashlib.sha256(raw).hexdigest()}
        try:
            return json.loads(raw.decode("utf-8"))
        except UnicodeDecodeError:
            raise InputError(f"{path}: not UTF-8 text") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None

    def bound_quiver(self, role: str, path: Optional[str]) -> Tuple[Quiver, IdealPresentation]:
        if path is None:
            raise InputError(f"--{role} is required")
        data = self.load(role, path)
        if not isinstance(data, dict):
            raise InputError(f"{path}: expected a JSON object")
        try:
            q = Quiver.from_json(data)
            ideal = IdealPresentation.from_json(q, data)
        except InputError as exc:
            raise InputError(f"{path}: {exc}") from None
        return q, ideal

    def morphism(self, path: Optional[str], src: Quiver, dst: Quiver) -> QuiverMorphism:
        if path is None:
            raise InputError("--map is required")
        data = self.load("map", path)
        try:
            return QuiverMorphism.from_json(src, dst, data)
        except InputError as exc:
            raise InputError(f"{path}: {exc}") from None

    def rep(self, role: str, path: str, q: Quiver, ideal: Optional[IdealPresentation]) -> Representation:
        data = self.load(role, path)
        try:
            return Representation.from_json(q, data, ideal)
        except InputError as exc:
            raise InputError(f"{path}: {exc}") from None

    def group(self, path: Optional[str], q: Quiver, ideal: IdealPresentation) -> ActionPresentation:
        if path is None:
            raise InputError("--group is required")
        data = self.load("group", path)
        try:
            return ActionPresentation.from_json(q, data, ideal)
        except InputError as exc:
            raise InputError(f"{path}: {exc}") from None


def _truncation(ideal: IdealPresentation) -> dict:
    return {"truncation_length": ideal.truncation_length, "nilpotency_bound": ideal.nilpotency_bound}


def _truncation_line(ideal: IdealPresentation) -> str:
    n = ideal.nilpotency_bound
    exact = "exact" if ideal.exact else "truncated"
    return f"truncation L={ideal.truncation_length}, N={'unset' if n is None else n} ({exact})"


def _window(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    return [v.strip() for v in text.split(",") if v.strip()]


def _bound_json(q: Quiver, ideal: IdealPresentation) -> dict:
    out = q.to_json()
    out.update(ideal.to_json())
    return out


def _hom_json(h) -> dict:
    return {v: [[la.format_frac(x) for x in row] for row in m] for v, m in sorted(h.items()) if m and m[0]}


class Run:
    """Collects what one invocation computed."""

    def __init__(self, args):
        self.args = args
        self.inputs = Inputs()
        self.lines: List[str] = []
        self.result: dict = {}
        self.parameters: dict = {}
        self.warnings: List[str] = []
        self.dot: Optional[str] = None

    def say(self, text: str) -> None:
        self.lines.append(text)

    def report(self) -> dict:
        return {
            "subcommand": self.args.command if self.args.command != "rep" else f"rep {self.args.action}",
            "inputs": self.inputs.files,
            "parameters": self.parameters,
            "result": self.result,
            "seed": self.args.seed,
            "warnings": self.warnings,
        }


# subcommands ----------------------------------------------------------------------------


def _pair(run: Run):
    a = run.args
    src, si = run.inputs.bound_quiver("src", a.src)
    dst, ti = run.inputs.bound_quiver("dst", a.dst)
    f = run.inputs.morphism(a.map, src, dst)
    return src, si, dst, ti, f


def cmd_check_quiver_covering(run: Run) -> None:
    _, _, _, _, f = _pair(run)
    rep = is_quiver_covering(f)
    run.result = {"ok": rep.ok, "surjective": rep.surjective, "violations": [list(x) for x in rep.violations]}
    run.say(f"quiver covering: {str(rep.ok).lower()}")
    for x, d in rep.violations[:10]:
        run.say(f"  {d}-star mismatch at {x}")


def cmd_check_relcovering(run: Run) -> None:
    src, si, dst, ti, f = _pair(run)
    run.parameters.update(source=_truncation(si), target=_truncation(ti))
    run.say("source " + _truncation_line(si))
    run.say("target " + _truncation_line(ti))
    rep = is_relation_covering(BoundQuiverMorphism(f, si, ti))
    run.result = rep.to_json()
    if rep.incomplete:
        run.warnings.append(f"{len(rep.incomplete)} lifts left the truncation")
    run.say(f"relation covering: {str(rep.ok).lower()}")
    for x in rep.failures[:10]:
        run.say(f"  failure: {x}")


def cmd_quotient_dims(run: Run) -> None:
    src, si, dst, ti, f = _pair(run)
    L = run.args.length
    if L is not None:
        si, ti = si.with_truncation(L), ti.with_truncation(L)
    run.parameters.update(source=_truncation(si), target=_truncation(ti), window=_window(run.args.window))
    run.say("source " + _truncation_line(si))
    run.say("target " + _truncation_line(ti))
    table = verify_quotient_covering_dims(BoundQuiverMorphism(f, si, ti), _window(run.args.window))
    run.result = table.to_json()
    if table.incomplete:
        run.warnings.append(f"{len(table.incomplete)} pairs skipped at incomplete stars")
    run.say(f"fibre sums match base dimensions: {str(table.ok).lower()} ({len(table.rows)} rows)")


def cmd_check_galois(run: Run) -> None:
    src, si, dst, ti, f = _pair(run)
    m = BoundQuiverMorphism(f, si, ti)
    run.parameters.update(source=_truncation(si), target=_truncation(ti))
    if run.args.group is None:
        res = galois_over_subgroups(m)
        run.result = res
        run.say(f"automorphism group order {res['aut_order']}, {len(res['subgroups'])} subgroups tried")
        run.say(f"galois covering: {str(res['galois']).lower()}")
        return
    A = run.inputs.group(run.args.group, src, si)
    rep = is_galois_covering(m, A)
    run.result = rep.to_json()
    run.say(f"galois covering: {str(rep.ok).lower()}")
    for r in rep.reasons:
        run.say(f"  {r}")


def cmd_orbit(run: Run) -> None:
    q, ideal = run.inputs.bound_quiver("quiver", run.args.quiver)
    A = run.inputs.group(run.args.group, q, ideal)
    run.parameters.update(truncation=_truncation(ideal))
    oq = orbit_quiver(A)
    if oq.ideal is None:
        run.warnings.append("action is not free: no induced ideal")
        quiver = oq.quiver.to_json()
    else:
        quiver = _bound_json(oq.quiver, oq.ideal)
    run.result = {"quiver": quiver, "projection": oq.projection.to_json(), "relation_covering": oq.covering_report}
    run.dot = oq.quiver.to_dot("orbit")
    run.say(f"orbit quiver: {len(oq.quiver.vertices)} vertices, {len(oq.quiver.arrows)} arrows")
    if oq.ideal is not None:
        for g in oq.ideal.generators:
            run.say(f"  relation {g}")
    run.say(json.dumps(quiver, sort_keys=True))


def cmd_pi1(run: Run) -> None:
    q, ideal = run.inputs.bound_quiver("quiver", run.args.quiver)
    base = run.args.base
    if base is not None and not q.has_vertex(base):
        raise InputError(f"unknown base vertex {base!r}")
    run.parameters.update(truncation=_truncation(ideal), base=base or q.vertices[0])
    g = fundamental_group(q, ideal, base)
    run.result = g.to_json()
    run.say(g.describe())
    run.say(f"generators: {', '.join(g.original.generators) or '-'}")
    run.say("relators: " + ("; ".join(g.original.to_json()["relators"]) or "-"))
    run.say(f"abelianization: {g.abelianization}")
    run.say(_truncation_line(ideal))


def cmd_simply_connected(run: Run) -> None:
    q, ideal = run.inputs.bound_quiver("quiver", run.args.quiver)
    run.parameters.update(truncation=_truncation(ideal))
    ok, rep = simply_connected_criterion(q, ideal)
    run.result = {"criterion": ok, **rep}
    run.say(f"criterion satisfied: {str(ok).lower()}")


def cmd_cover(run: Run) -> None:
    q, ideal = run.inputs.bound_quiver("quiver", run.args.quiver)
    radius = 3 if run.args.radius is None else run.args.radius
    run.parameters.update(truncation=_truncation(ideal), radius=radius, base=run.args.base or q.vertices[0])
    cov = build_universal_cover(q, ideal, run.args.base, radius)
    run.result = {"cover": cov.to_json(), "verify": cov.verify(), "pi1": cov.group.verdict}
    if cov.frontier:
        run.warnings.append(f"truncated at radius {radius}: {len(cov.frontier)} frontier vertices")
    run.dot = cov.to_dot()
    run.say(f"cover: {len(cov.cover.vertices)} vertices, {len(cov.cover.arrows)} arrows, radius {radius}")
    run.say(f"pi1 of base: {cov.group.describe()}")
    run.say(_truncation_line(ideal))
    if run.args.deck is not None:
        w = q.parse_walk(run.args.deck, cov.base)
        g = deck_action(cov, w)
        run.parameters["deck"] = run.args.deck
        run.result["deck"] = g.to_json()
        run.say(f"deck element {w}: " + ", ".join(f"{x}->{y}" for x, y in sorted(g.vertex_map.items())))


def cmd_pushdown(run: Run) -> None:
    src, si, dst, ti, f = _pair(run)
    if not run.args.rep:
        raise InputError("--rep is required")
    M = run.inputs.rep("rep", run.args.rep[0], src, si)
    V = push_down(f, M, ti)
    run.result = {"rep": V.to_json()}
    run.say(f"push-down dimension vector: {V.dims}")


def cmd_pullup(run: Run) -> None:
    src, si, dst, ti, f = _pair(run)
    if not run.args.rep:
        raise InputError("--rep is required")
    V = run.inputs.rep("rep", run.args.rep[0], dst, ti)
    window = _window(run.args.window)
    run.parameters["window"] = window
    pu = pull_up(f, V, window, si)
    run.result = {"rep": pu.rep.to_json(), "window": pu.window}
    if pu.windowed and window is not None:
        run.warnings.append(pu.note)
    run.say(f"pull-up on {len(pu.window)} window vertices, total dimension {pu.rep.total_dim}")


def cmd_rep(run: Run) -> None:
    q, ideal = run.inputs.bound_quiver("quiver", run.args.quiver)
    paths = run.args.rep or []
    need = 2 if run.args.action in ("hom", "iso") else 1
    if len(paths) != need:
        raise InputError(f"rep {run.args.action} takes {need} --rep file(s)")
    reps = [run.inputs.rep(f"rep{i}", p, q, ideal) for i, p in enumerate(paths)]
    act = run.args.action
    if act == "check":
        ok, bad = reps[0].check()
        run.result = {"ok": ok, "violated": bad}
        run.say(f"satisfies relations: {str(ok).lower()}" + (f" (fails {bad})" if bad else ""))
    elif act == "hom":
        basis = hom_basis(reps[0], reps[1])
        run.result = {"dim": len(basis), "basis": [_hom_json(h) for h in basis]}
        run.say(f"dim Hom = {len(basis)}")
    elif act == "iso":
        res = are_isomorphic(reps[0], reps[1], seed=run.args.seed)
        run.result = {"iso": res.iso, "method": res.method}
        if res.witness is not None:
            run.result["witness"] = _hom_json(res.witness)
        run.say(f"isomorphic: {str(res.iso).lower()} ({res.method})")
    else:
        res = is_indecomposable(reps[0], seed=run.args.seed)
        run.result = res.to_json()
        run.say(f"indecomposable: {res.verdict}")


def _string_setup(run: Run):
    q, ideal = run.inputs.bound_quiver("quiver", run.args.quiver)
    ok, why = is_string_presentation(q, ideal)
    if not ok:
        raise InputError(f"not a string algebra presentation: {why}")
    return q, ideal


def cmd_strings(run: Run) -> None:
    q, ideal = _string_setup(run)
    n = 3 if run.args.max_len is None else run.args.max_len
    run.parameters.update(max_len=n, truncation=_truncation(ideal))
    out = [str(w) if w.steps else f"e_{w.start}" for w in enumerate_strings(q, ideal, n)]
    run.result = {"strings": out}
    run.say(f"{len(out)} strings of length <= {n}")
    for s in out:
        run.say(f"  {s}")


def cmd_bands(run: Run) -> None:
    q, ideal = _string_setup(run)
    n = 4 if run.args.max_len is None else run.args.max_len
    run.parameters.update(max_len=n, truncation=_truncation(ideal))
    out = [str(w) for w in enumerate_bands(q, ideal, n)]
    run.result = {"bands": out}
    run.say(f"{len(out)} bands of length <= {n}")
    for s in out:
        run.say(f"  {s}")


def cmd_bandmod(run: Run) -> None:
    q, ideal = _string_setup(run)
    if run.args.band is None:
        raise InputError("--band is required")
    n = 1 if run.args.n is None else run.args.n
    lam = "1" if run.args.lam is None else run.args.lam
    try:
        value = la.frac(lam)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"--lambda: not a rational number: {lam!r}") from None
    w = q.parse_walk(run.args.band)
    if not is_band(q, ideal, w):
        raise InputError(f"{run.args.band} is not a band")
    M = band_module(q, w, n, value, ideal)
    run.parameters.update(band=run.args.band, n=n, **{"lambda": la.format_frac(value)})
    run.result = {"rep": M.to_json()}
    run.say(f"band module for {w}, n={n}, lambda={la.format_frac(value)}: dims {M.dims}")


def cmd_reptype(run: Run) -> None:
    q, ideal = run.inputs.bound_quiver("quiver", run.args.quiver)
    run.parameters["radius"] = run.args.radius
    rep = representation_type(q, ideal, run.args.radius)
    run.result = rep
    run.say(f"verdict: {rep['verdict']}")
    for key in ("path_algebra", "wild_patterns", "two_in_two_out"):
        part = rep.get(key)
        if part and part.get("certificate"):
            run.say(f"  {key}: {json.dumps(part['certificate'], sort_keys=True)}")
    if "e7tt_tree" in rep:
        cert = rep["e7tt_tree"]
        run.say(f"  e7tt_tree: {json.dumps(cert, sort_keys=True) if cert else 'none found'}")


COMMANDS = {
    "check-quiver-covering": cmd_check_quiver_covering,
    "check-relcovering": cmd_check_relcovering,
    "quotient-dims": cmd_quotient_dims,
    "check-galois": cmd_check_galois,
    "orbit": cmd_orbit,
    "pi1": cmd_pi1,
    "simply-connected": cmd_simply_connected,
    "cover": cmd_cover,
    "pushdown": cmd_pushdown,
    "pullup": cmd_pullup,
    "rep": cmd_rep,
    "strings": cmd_strings,
    "bands": cmd_bands,
    "bandmod": cmd_bandmod,
    "reptype": cmd_reptype,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiver", help="bound quiver JSON")
    common.add_argument("--src", help="source bound quiver JSON")
    common.add_argument("--dst", help="target bound quiver JSON")
    common.add_argument("--map", help="morphism JSON")
    common.add_argument("--group", help="group action JSON")
    common.add_argument("--rep", action="append", help="representation JSON (repeat for two)")
    common.add_argument("--window", help="comma-separated cover vertices")
    common.add_argument("--radius", type=int)
    common.add_argument("--base", help="base vertex")
    common.add_argument("--deck", help="closed walk at the base, e.g. b,-a")
    common.add_argument("--length", type=int, help="override the truncation length")
    common.add_argument("--max-len", dest="max_len", type=int)
    common.add_argument("--band", help="band word, e.g. a,-b")
    common.add_argument("--n", type=int)
    common.add_argument("--lambda", dest="lam")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the run report here")
    common.add_argument("--dot", help="write Graphviz text here")
    common.add_argument("--json", action="store_true", help="print the run report instead of the summary")

    p = _Parser(prog="qcov", description="Covering theory for quivers with relations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        if name == "rep":
            sp = sub.add_parser(name, parents=[common])
            sp.add_argument("action", choices=["check", "hom", "iso", "indec"])
        else:
            sub.add_parser(name, parents=[common])
    return p


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    run = Run(args)
    try:
        COMMANDS[args.command](run)
    except (InputError, LiftError) as exc:
        print(f"qcov: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Refusal as exc:
        print(f"qcov: refused: {exc}", file=sys.stderr)
        return EXIT_REFUSAL
    report = run.report()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(_dump(report))
    if args.dot:
        if run.dot is None:
            print("qcov: input error: --dot is not available for this subcommand", file=sys.stderr)
            return EXIT_INPUT
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(run.dot)
    if args.json:
        sys.stdout.write(_dump(report))
    else:
        for w in run.warnings:
            run.say(f"warning: {w}")
        sys.stdout.write("\n".join(run.lines) + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
