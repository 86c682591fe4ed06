"""Command-line front end.

Every subcommand gathers findings from the library calls, prints one line per
finding, and optionally writes them as a deterministic JSON document.
Exit codes: 0 all findings pass, 1 a finding failed, 2 bad input,
3 an unsupported local model was met.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from holonomy_forge import estimates, forms, orbifold, resolution, spin7, wps
from holonomy_forge.resources import asset_path, figure1_points, table1_entries

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 1, 2, 3

BUNDLED_ORBIFOLD = "t7_z2cubed.orb"
BUNDLED_WPS = "cy4_wps_1111_44.ywp"


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class ValidationError(ValueError):
    def __init__(self, generator: str, message: str):
        self.generator = generator
        super().__init__(f"generator {generator}: {message}")


class UnsupportedInput(RuntimeError):
    pass


# --- orbifold spec files --------------------------------------------------------------------

STRUCTURES = {"g2": (7, forms.Structure.G2_PHI), "spin7": (8, forms.Structure.SPIN7_OMEGA)}


@dataclass(frozen=True)
class OrbifoldSpec:
    dim: int
    structure: str
    generators: tuple[orbifold.AffineIsometry, ...]

    def structure_form(self) -> forms.KForm:
        return forms.canonical(STRUCTURES[self.structure][1])


def _tokens(line: str) -> list[tuple[str, int]]:
    out, i = [], 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace():
            j += 1
        out.append((line[i:j], i + 1))
        i = j
    return out


def parse_orbifold_spec(text: str) -> OrbifoldSpec:
    """``dim n``, ``structure g2|spin7``, then blocks of n matrix rows plus a translation row."""
    dim = structure = None
    rows: list[tuple[int, list[tuple[str, int]]]] = []
    labels: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        head = toks[0][0]
        if head == "dim":
            if len(toks) != 2:
                raise ParseError("expected 'dim <n>'", lineno, toks[0][1])
            try:
                dim = int(toks[1][0])
            except ValueError:
                raise ParseError(f"bad dimension {toks[1][0]!r}", lineno, toks[1][1]) from None
            if dim < 1:
                raise ParseError("dimension must be positive", lineno, toks[1][1])
        elif head == "structure":
            if len(toks) != 2 or toks[1][0] not in STRUCTURES:
                col = toks[1][1] if len(toks) > 1 else toks[0][1]
                raise ParseError(f"structure must be one of {sorted(STRUCTURES)}", lineno, col)
            structure = toks[1][0]
        elif head == "generator":
            if len(toks) != 2:
                raise ParseError("expected 'generator <label>'", lineno, toks[0][1])
            labels.append((len(rows), toks[1][0]))
        else:
            if dim is None:
                raise ParseError("matrix rows before 'dim'", lineno, toks[0][1])
            rows.append((lineno, toks))
    if dim is None:
        raise ParseError("missing 'dim' header", 1)
    if structure is None:
        raise ParseError("missing 'structure' header", 1)
    if STRUCTURES[structure][0] != dim:
        raise ParseError(f"structure {structure} lives in dimension {STRUCTURES[structure][0]}, not {dim}", 1)
    block = dim + 1
    if len(rows) % block:
        lineno = rows[-1][0] if rows else 1
        raise ParseError(f"generator blocks need {dim} matrix rows plus one translation row", lineno)
    label_at = dict(labels)
    gens = []
    for k in range(len(rows) // block):
        label = label_at.get(k * block, f"g{k + 1}")
        chunk = rows[k * block : (k + 1) * block]
        matrix = []
        for lineno, toks in chunk[:dim]:
            if len(toks) != dim:
                raise ParseError(f"expected {dim} entries, found {len(toks)}", lineno, toks[0][1])
            row = []
            for tok, col in toks:
                try:
                    row.append(int(tok))
                except ValueError:
                    raise ParseError(f"matrix entry {tok!r} is not an integer", lineno, col) from None
            matrix.append(tuple(row))
        lineno, toks = chunk[dim]
        if len(toks) != dim:
            raise ParseError(f"translation needs {dim} entries, found {len(toks)}", lineno, toks[0][1])
        trans = []
        for tok, col in toks:
            try:
                trans.append(Fraction(tok))
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"translation entry {tok!r} is not a rational p/q", lineno, col) from None
        try:
            gens.append(orbifold.AffineIsometry(tuple(matrix), tuple(trans), label=label))
        except ValueError as exc:
            raise ValidationError(label, str(exc)) from None
    return OrbifoldSpec(dim, structure, tuple(gens))


# --- reports -------------------------------------------------------------------------------------


@dataclass(frozen=True)
class Finding:
    claim: str
    status: str  # pass | fail | info
    value: Any
    citation: str

    def line(self) -> str:
        return f"[{self.status.upper():4}] {self.claim}: {_plain(self.value)}  ({self.citation})"


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    findings: list[Finding] = field(default_factory=list)
    timing_ms: float = 0.0
    exit_code: int = EXIT_OK

    def add(self, claim: str, passed: bool | None, value: Any, citation: str) -> bool:
        status = "info" if passed is None else ("pass" if passed else "fail")
        self.findings.append(Finding(claim, status, value, citation))
        return bool(passed) if passed is not None else True

    @property
    def passed(self) -> bool:
        return all(f.status != "fail" for f in self.findings)

    def to_dict(self, include_timing: bool = False) -> dict:
        doc = {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "exit_code": self.exit_code,
            "findings": [
                {"claim": f.claim, "status": f.status, "value": _jsonable(f.value), "citation": f.citation}
                for f in self.findings
            ],
        }
        if include_timing:
            doc["timing_ms"] = round(self.timing_ms, 3)
        return doc

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return str(v)


def _plain(v) -> str:
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_plain(x) for x in v) + ")"
    return str(v)


def inputs_digest(command: str, inputs: Sequence[tuple[str, bytes]]) -> str:
    h = hashlib.sha256()
    h.update(command.encode())
    for name, data in inputs:
        h.update(b"\0" + name.encode() + b"\0" + hashlib.sha256(data).hexdigest().encode())
    return h.hexdigest()


# --- pipelines ---------------------------------------------------------------------------------

CITE_FORMS = "flat model forms of G2 and Spin(7)"
CITE_SPLIT = "splitting of the exceptional forms along SU(m)"
CITE_FIXED = "fixed points of the T^7/Z2^3 example"
CITE_BETTI = "Betti numbers of the resolved T^7/Z2^3 example; plotted G2 Betti set"
CITE_EST = "estimates for deforming to torsion-free G2-structures"
CITE_GROUP = "order-8 subgroup of Spin(7) acting freely on R^8 minus 0"
CITE_FRAME = "complex frames in which the group acts via SU(4)"
CITE_WPS = "degree-12 hypersurface in CP^5_{1,1,1,1,4,4}"
CITE_HOL = "holonomy of the resolved Spin(7) orbifold"


def run_verify_structures(rep: RunReport) -> None:
    phi = forms.canonical(forms.Structure.G2_PHI)
    star_phi = forms.canonical(forms.Structure.G2_STAR_PHI)
    omega = forms.canonical(forms.Structure.SPIN7_OMEGA)
    rep.add("phi0 has 7 terms", len(phi) == 7, len(phi), CITE_FORMS)
    rep.add("*phi0 has 7 terms", len(star_phi) == 7, len(star_phi), CITE_FORMS)
    rep.add("Omega0 has 14 terms", len(omega) == 14, len(omega), CITE_FORMS)
    rep.add("hodge_star(phi0) = *phi0", forms.hodge_star(phi) == star_phi, "exact", CITE_FORMS)
    rep.add("hodge_star(Omega0) = Omega0", forms.hodge_star(omega) == omega, "exact", CITE_FORMS)
    vol7, vol8 = forms.KForm.volume(7), forms.KForm.volume(8)
    rep.add("phi0 ^ *phi0 = 7 vol", (phi ^ star_phi) == vol7 * 7, "7", "plumbing")
    rep.add("Omega0 ^ Omega0 = 14 vol", (omega ^ omega) == vol8 * 14, "14", "plumbing")
    for ident in forms.Identity:
        res = forms.verify_identity(ident)
        rep.add(f"identity {ident.value}", res.holds, f"{len(res.discrepancy)} discrepancy terms", CITE_SPLIT)


def _load_orbifold(path: Path | None) -> tuple[OrbifoldSpec, str, bytes]:
    p = path or asset_path(BUNDLED_ORBIFOLD)
    data = p.read_bytes()
    return parse_orbifold_spec(data.decode("utf-8")), p.name, data


def run_orbifold_analyze(rep: RunReport, spec: OrbifoldSpec) -> None:
    group = orbifold.generate_group(spec.generators, dim=spec.dim)
    rep.add("group order", None, group.order, CITE_FIXED)
    form = spec.structure_form()
    bad = [group.word(g) for g in group.elements if not orbifold.preserves(g, form)]
    rep.add(f"every element preserves the {spec.structure} form", not bad, bad or "all", CITE_FIXED)
    if bad:
        return
    for g in group.non_identity():
        loc = orbifold.fixed_locus(g)
        value = "empty" if loc.is_empty() else f"{loc.count} x T^{loc.component_dim}"
        rep.add(f"fixed locus of {group.word(g)}", None, value, CITE_FIXED)
    sset = resolution.classify_singular_set(orbifold.singular_set(group, form))
    models = sorted({c.local_model.describe() for c in sset.components})
    dims = sorted({c.dim for c in sset.components})
    value = f"{len(sset.components)} components, {', '.join(f'T^{d}' for d in dims) or 'none'}, model {', '.join(models) or 'none'}"
    rep.add("singular set", None, value, CITE_FIXED)
    rep.add("fixed subtori upstairs", None, sset.total_components, CITE_FIXED)
    rep.add("singular subtori are disjoint", not sset.intersections, len(sset.intersections), CITE_FIXED)
    unsupported = [c for c in sset.components if not c.local_model.supported]
    rep.add("all local models supported", not unsupported, [c.local_model.describe() for c in unsupported] or "yes", CITE_FIXED)
    if unsupported:
        raise UnsupportedInput(unsupported[0].local_model.describe())


def run_orbifold_betti(rep: RunReport, spec: OrbifoldSpec) -> None:
    group = orbifold.generate_group(spec.generators, dim=spec.dim)
    try:
        pipe = resolution.betti_pipeline(group, spec.structure_form())
    except (resolution.UnsupportedModel, resolution.NonFreeMonodromy) as exc:
        rep.add("resolution data available", False, str(exc), CITE_BETTI)
        raise UnsupportedInput(str(exc)) from None
    base = tuple(pipe.base)
    rep.add("orbifold Betti numbers", pipe.base.is_poincare_symmetric(), base, CITE_BETTI)
    rep.add("b1 of the orbifold", base[1] == 0, base[1], CITE_BETTI)
    rep.add("(b2, b3) of the resolution", None, (pipe.b2, pipe.b3), CITE_BETTI)
    if spec.structure == "g2":
        on_plot = (pipe.b2, pipe.b3) in figure1_points()
        rep.add("(b2, b3) is a plotted G2 Betti pair", on_plot, (pipe.b2, pipe.b3), CITE_BETTI)


def run_estimates_check(rep: RunReport, data: estimates.EstimateData, reference: estimates.EstimateData) -> None:
    hyp = estimates.check_hypotheses(data.profile, data.required)
    for r in hyp.results:
        rep.add(f"hypothesis {r.quantity}", r.passed, f"{r.given} vs {r.required}, margin {r.margin}", CITE_EST)
    rep.add("hypotheses", hyp.passed, hyp.summary(), CITE_EST)
    clo = estimates.check_induction_closure(data.system)
    for c in clo.constraints:
        rep.add(f"constant constraint for {c.norm}", None, str(c), CITE_EST)
    m = clo.min_positive_margin
    value = f"induction {'closes' if clo.closes else 'does not close'}, min margin t^{{{m}}}" if m is not None else (
        f"induction {'closes' if clo.closes else 'does not close'}"
    )
    if clo.failing:
        value += "; failing: " + ", ".join(f"{f.norm}: {f.term} (margin {f.margin})" for f in clo.failing)
    rep.add("induction closure", clo.closes, value, CITE_EST)
    rep.add("estimates", hyp.passed and clo.closes, f"{hyp.summary()}; {value}", CITE_EST)
    rep.add("constant constraints solvable", clo.solvable, " < ".join(clo.solve_order) or "; ".join(clo.notes), CITE_EST)
    devs = estimates.deviations(data.system, reference.system)
    rep.add("rules match the stated powers of t", None, devs or "yes", CITE_EST)


def run_spin7_demo(rep: RunReport, wspec: wps.WpsSpec) -> None:
    grp = spin7.check_quaternion_group()
    rep.add("|G| = 8, nonabelian", grp.order == 8 and grp.nonabelian, grp.order, CITE_GROUP)
    for name, ok in grp.relations:
        rep.add(name, ok, ok, CITE_GROUP)
    rep.add("free action on R^8 minus 0", grp.free_elements == grp.order - 1, f"{grp.free_elements}/{grp.order - 1}", CITE_GROUP)
    rep.add("Omega0 preserved", grp.omega_preserving == grp.order, f"{grp.omega_preserving}/{grp.order}", CITE_GROUP)
    for name in spin7.FrameName:
        try:
            fr = spin7.frame_report(spin7.ComplexFrame.standard(name), grp.group)
        except spin7.FrameIdentityFails as exc:
            rep.add(f"{name.value}: Omega0 = w^2/2 + Re theta", False, str(exc), CITE_FRAME)
            continue
        rep.add(f"{name.value}: Omega0 = w^2/2 + Re theta", fr.ok, "zero discrepancy", CITE_FRAME)
        rep.add(f"{name.value}: multiplication by i", None, list(fr.complex_multiplication), CITE_FRAME)
        rep.add(f"{name.value}: quaternionic map", None, list(fr.quaternionic), CITE_FRAME)
    y, sigma = wspec.hypersurface, wspec.involution
    rep.add("trivial canonical bundle (degree = sum of weights)", wps.canonical_degree_check(y), f"{y.degree} vs {sum(y.weights)}", wps.CANONICAL_DEGREE_RULE)
    pts = wps.singular_points(y)
    rep.add("orbifold points", None, [f"{p} (order {o})" for p, o in pts], CITE_WPS)
    if wspec.points:
        found = [p for p, _ in pts]
        match = len(found) == len(wspec.points) and all(any(q == p for p in found) for q in wspec.points)
        rep.add("orbifold points match the listed ones", match, len(found), CITE_WPS)
    if sigma is not None:
        try:
            inv = wps.verify_involution(y, sigma, [p for p, _ in pts])
        except (wps.NotWellDefined, wps.NotInvolutive) as exc:
            rep.add("involution", False, str(exc), CITE_WPS)
        else:
            rep.add("involution preserves Y", True, f"conj(f o sigma) = {inv.scalar} f", CITE_WPS)
            rep.add("sigma^2 = 1 on weighted projective space", True, f"acts as u = {inv.square_unit}", CITE_WPS)
            rep.add("sigma fixes the orbifold points", inv.fixes_listed, sum(ok for _, ok in inv.listed_fixed), CITE_WPS)
            rep.add("sampled smooth points are moved", inv.isolated_fixed_points_plausible, f"{inv.sampled} samples", CITE_WPS)
    rep.add("simple connectivity and h^{2,0} = 0", None, "asserted by the construction, not verified", CITE_WPS)
    k = len(pts) or 1
    counts = spin7.enumerate_outcomes(k)
    rep.add(
        f"holonomy over all 2^{k} resolution choices",
        counts[spin7.Holonomy.Z2_LTIMES_SU4] == 1 and counts[spin7.Holonomy.SPIN7] == 2**k - 1,
        {h.value: n for h, n in counts.items()},
        CITE_HOL,
    )


def run_reference(rep: RunReport) -> None:
    pts = figure1_points()
    rep.add("distinct plotted G2 Betti pairs", len(pts) == 252, len(pts), "plotted G2 Betti set")
    rep.add("Spin(7) Betti triples on record", None, len(table1_entries()), "tabulated Spin(7) Betti numbers")


# --- entry point ------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="holonomy-forge", description=__doc__.splitlines()[0])
    p.add_argument("--json", metavar="PATH", help="also write the run report as JSON")
    p.add_argument("--include-timing", action="store_true", help="put wall time into the JSON (breaks byte-identity)")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-structures", help="canonical forms and their splittings")
    for name in ("orbifold-analyze", "orbifold-betti"):
        sp = sub.add_parser(name)
        sp.add_argument("file", nargs="?", type=Path, help=f"orbifold spec (default: bundled {BUNDLED_ORBIFOLD})")
    sp = sub.add_parser("estimates-check")
    sp.add_argument("file", nargs="?", type=Path, help="estimate profile/system (default: bundled)")
    sp = sub.add_parser("spin7-demo")
    sp.add_argument("file", nargs="?", type=Path, help=f"weighted hypersurface (default: bundled {BUNDLED_WPS})")
    sp = sub.add_parser("report", help="run every pipeline on the bundled inputs")
    sp.add_argument("--json", dest="report_json", metavar="PATH")
    return p


def _read(path: Path | None, bundled: str) -> tuple[str, bytes]:
    p = path or asset_path(bundled)
    return p.name, p.read_bytes()


def execute(args: argparse.Namespace) -> RunReport:
    cmd = args.command
    inputs: list[tuple[str, bytes]] = []
    steps: list[Callable[[RunReport], None]] = []

    def orb_step(fn, path):
        name, data = _read(path, BUNDLED_ORBIFOLD)
        inputs.append((name, data))
        spec = parse_orbifold_spec(data.decode("utf-8"))
        steps.append(lambda rep: fn(rep, spec))

    def est_step(path):
        name, data = _read(path, "estimates_default")
        inputs.append((name, data))
        data_obj = estimates.parse_estimates(data.decode("utf-8"))
        reference = estimates.default_estimates()
        steps.append(lambda rep: run_estimates_check(rep, data_obj, reference))

    def wps_step(path):
        name, data = _read(path, BUNDLED_WPS)
        inputs.append((name, data))
        wspec = wps.parse_ywp(data.decode("utf-8"))
        steps.append(lambda rep: run_spin7_demo(rep, wspec))

    if cmd == "verify-structures":
        steps.append(run_verify_structures)
    elif cmd == "orbifold-analyze":
        orb_step(run_orbifold_analyze, args.file)
    elif cmd == "orbifold-betti":
        orb_step(run_orbifold_betti, args.file)
    elif cmd == "estimates-check":
        est_step(args.file)
    elif cmd == "spin7-demo":
        wps_step(args.file)
    elif cmd == "report":
        steps.append(run_verify_structures)
        orb_step(run_orbifold_analyze, None)
        orb_step(run_orbifold_betti, None)
        est_step(None)
        wps_step(None)
        steps.append(run_reference)
    rep = RunReport(cmd, inputs_digest(cmd, inputs))
    start = time.perf_counter()
    try:
        for step in steps:
            step(rep)
    finally:
        rep.timing_ms = (time.perf_counter() - start) * 1000
    rep.exit_code = EXIT_OK if rep.passed else EXIT_FAILED
    return rep


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    json_path = getattr(args, "report_json", None) or args.json
    try:
        rep = execute(args)
    except (ParseError, ValidationError, wps.WpsError, estimates.EstimateError, OSError, UnicodeDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (UnsupportedInput, resolution.UnsupportedModel) as exc:
        print(f"unsupported model: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    for f in rep.findings:
        print(f.line())
    print(f"{rep.command}: {'all findings pass' if rep.passed else 'some findings FAILED'} ({rep.timing_ms:.0f} ms)")
    if json_path:
        Path(json_path).write_text(rep.to_json(args.include_timing), encoding="utf-8")
    return rep.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
