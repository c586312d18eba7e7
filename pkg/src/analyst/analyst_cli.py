#!/usr/bin/env python3
"""
Analyst CLI - Command-line interface for entanglement analysis

This CLI allows analysts to:
- Run the criteria battery on a state document (analyze)
- Check complete positivity of a map or channel (choi)
- Apply one positive map as an entanglement witness (witness)
- Generate reference states as documents (gen)

Exit codes: 0 = separable-consistent / CP, 1 = entangled-detected / not CP, 2 = input error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

# Add the project root to Python path for imports
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from src.posmap.channels import as_elementary_operator
from src.posmap.config import DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL, LOG_FORMAT
from src.posmap.errors import DocumentError, PosmapError
from src.posmap.maps import (
    BUILTIN_MAPS,
    ElementaryOperator,
    builtin_map,
    choi_report,
    is_completely_positive,
    ncp_quick_filters,
    positivity_falsifier,
)
from src.posmap.states import (
    BipartiteState,
    Side,
    Verdict,
    bell_state,
    gamma_detected_state,
    map_witness_test,
    ppt_entangled_state,
    random_separable,
    run_battery,
)
from src.posmap.storage.documents import (
    ChannelDocument,
    StateDocument,
    load_document,
    save_document,
    to_domain,
)


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DETECTED = 1
EXIT_INPUT_ERROR = 2

GENERATORS = ("rho", "rho1", "separable", "bell")


def _coefficient_rows(rows: Optional[Sequence[str]]) -> Optional[List[List[float]]]:
    """'1,0.5,0' per row -> [[1.0, 0.5, 0.0]]"""
    if rows is None:
        return None
    try:
        return [[float(x) for x in row.split(",")] for row in rows]
    except ValueError as e:
        raise PosmapError(f"coefficient rows must be comma-separated numbers: {str(e)}")


class AnalystCLI:
    """Analyst command-line interface"""

    def __init__(self, tol: float = DEFAULT_TOL, as_json: bool = False):
        self.tol = tol
        self.as_json = as_json

    def load_state(self, path: str) -> BipartiteState:
        document = load_document(path)
        if not isinstance(document, StateDocument):
            raise DocumentError(f"{path} holds a {document.kind} document, expected a state")
        return to_domain(document, self.tol)

    def resolve_map(self, name_or_path: str, default_n: Optional[int] = None, n: Optional[int] = None,
                    t: Optional[float] = None, plus_rows: Optional[Sequence[str]] = None,
                    minus_rows: Optional[Sequence[str]] = None) -> Tuple[ElementaryOperator, Optional[str]]:
        """
        Builtin map by name, else a map or channel document

        Args:
            name_or_path: One of BUILTIN_MAPS, a file path, or "-"
            default_n: Dimension used when n is not given (the acted factor)
            n: Explicit dimension
            t: delta-t parameter
            plus_rows: diagonal-family plus coefficient rows
            minus_rows: diagonal-family minus coefficient rows

        Returns:
            (operator, audited channel kind or None)
        """
        if name_or_path in BUILTIN_MAPS:
            phi = builtin_map(name_or_path, n=n if n is not None else default_n, t=t,
                              a=_coefficient_rows(plus_rows), b=_coefficient_rows(minus_rows))
            return phi, None
        document = load_document(name_or_path)
        if isinstance(document, StateDocument):
            raise DocumentError(f"{name_or_path} holds a state document, expected a map or channel")
        obj = to_domain(document, self.tol)
        if isinstance(document, ChannelDocument):
            return as_elementary_operator(obj, label=Path(name_or_path).stem or "channel"), obj.kind.value
        return obj, None

    def analyze(self, rho: BipartiteState, maps: Optional[List[ElementaryOperator]] = None,
                side: Side = Side.RIGHT) -> int:
        """Criteria battery; 1 if any criterion detects entanglement"""
        battery = None if maps is None else [(phi, side) for phi in maps]
        report = run_battery(rho, battery, self.tol)

        if self.as_json:
            print(report.model_dump_json(indent=2, exclude_none=True))
        else:
            print(f"🔍 Analyzing {rho.dim_a}x{rho.dim_b} state (tol {self.tol:g})")
            print(f"{self._mark(report.ppt.verdict)} PPT: min eigenvalue of partial transpose = {report.ppt.min_eigenvalue:.10g}")
            print(f"{self._mark(report.realignment.verdict)} Realignment: trace norm = {report.realignment.trace_norm:.10g}")
            for witness in report.witnesses:
                print(f"{self._mark(witness.verdict)} Witness {witness.map_label} ({witness.side.value}): "
                      f"min eigenvalue = {witness.min_eigenvalue:.10g}")
            if report.entangled:
                print("🎉 Overall: entangled-detected")
            else:
                print("📋 Overall: separable-consistent (no criterion fired)")
        return EXIT_DETECTED if report.entangled else EXIT_OK

    def choi(self, phi: ElementaryOperator, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
             kind: Optional[str] = None) -> int:
        """CP verdict from the Choi matrix, plus structural filters and a positivity falsifier"""
        if samples < 1:
            raise PosmapError(f"--samples must be >= 1, got {samples}")
        check = is_completely_positive(phi, self.tol)
        filters = ncp_quick_filters(phi, seed=seed, tol=self.tol)
        falsifier = None if check.is_cp else positivity_falsifier(phi, samples=samples, seed=seed, tol=self.tol)

        if self.as_json:
            report = choi_report(phi, check, filters, falsifier, channel_kind=kind)
            print(report.model_dump_json(indent=2, exclude_none=True))
        else:
            print(f"🔍 Choi check of {phi.label} ({phi.dim_in} -> {phi.dim_out}, tol {self.tol:g})")
            if kind is not None:
                print(f"📋 Channel kind: {kind}")
            print(f"📋 Min Choi eigenvalue: {check.min_choi_eigenvalue:.10g}")
            for line in filters.summary():
                print(f"   - {line}")
            if falsifier is not None:
                if falsifier.found:
                    print(f"❌ Not positive: sample {falsifier.sample_index} gives eigenvalue {falsifier.min_eigenvalue:.6g}")
                else:
                    print(f"⚠️  No positivity counterexample in {falsifier.samples_checked} samples "
                          f"(lowest eigenvalue {falsifier.min_eigenvalue:.6g}); the map may be positive")
            print("✅ Completely positive" if check.is_cp else "❌ Not completely positive")
        return EXIT_OK if check.is_cp else EXIT_DETECTED

    def witness(self, rho: BipartiteState, phi: ElementaryOperator, side: Side = Side.RIGHT,
                spectrum: bool = False) -> int:
        """One positive-map witness; 1 if it detects entanglement"""
        result = map_witness_test(rho, phi, side, self.tol, spectrum=spectrum)

        if self.as_json:
            print(result.model_dump_json(indent=2, exclude_none=True))
        else:
            print(f"🔍 Witness {phi.label} on the {Side(side).value} factor (tol {self.tol:g})")
            print(f"{self._mark(result.verdict)} Min eigenvalue: {result.min_eigenvalue:.10g}")
            if result.spectrum is not None:
                print("📋 Spectrum: " + ", ".join(f"{v:.10g}" for v in result.spectrum))
            if result.verdict == Verdict.FAIL:
                print("🎉 Entanglement detected")
        return EXIT_DETECTED if result.verdict == Verdict.FAIL else EXIT_OK

    def generate(self, name: str, out: str = "-", a: Optional[float] = None, b: Optional[float] = None,
                 dims: Sequence[int] = (3, 3), terms: int = 4, factors: str = "pure",
                 seed: int = DEFAULT_SEED) -> int:
        """Write a reference state document"""
        if name == "rho":
            if a is None or b is None:
                raise PosmapError("gen rho needs --a and --b")
            rho = ppt_entangled_state(a, b, self.tol)
        elif name == "rho1":
            rho = gamma_detected_state()
        elif name == "bell":
            rho = bell_state()
        elif name == "separable":
            rho = random_separable(dims[0], dims[1], terms=terms, seed=seed, factors=factors)
        else:
            raise PosmapError(f"unknown state '{name}', expected one of {', '.join(GENERATORS)}")
        save_document(rho, out)
        if out != "-":
            print(f"✅ Wrote {name} ({rho.dim_a}x{rho.dim_b}) to {out}")
        return EXIT_OK

    @staticmethod
    def _mark(verdict: Verdict) -> str:
        return "✅" if verdict == Verdict.PASS else "❌"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--tol', type=float, default=DEFAULT_TOL, help='Numerical tolerance (default 1e-9)')
    parser.add_argument('--json', action='store_true', help='Emit a JSON report')


def _add_map_parameters(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--n', type=int, help='Dimension of a builtin map (default: the acted factor)')
    parser.add_argument('--t', type=float, help='Parameter t of delta-t')
    parser.add_argument('--plus-row', action='append', metavar='C1,C2,...',
                        help='diagonal-family plus coefficient row (repeatable)')
    parser.add_argument('--minus-row', action='append', metavar='C1,C2,...',
                        help='diagonal-family minus coefficient row (repeatable)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Posmap Analyst CLI")
    parser.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='Logging level on stderr')
    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    analyze_parser = subparsers.add_parser('analyze', help='Run the criteria battery on a state')
    analyze_parser.add_argument('state', help='State document path, or - for stdin')
    analyze_parser.add_argument('--map', action='append', dest='maps',
                                help=f"Witness map: builtin ({', '.join(BUILTIN_MAPS)}) or document (repeatable)")
    analyze_parser.add_argument('--side', choices=['left', 'right'], default='right', help='Factor the maps act on')
    _add_common(analyze_parser)
    _add_map_parameters(analyze_parser)

    choi_parser = subparsers.add_parser('choi', help='Complete positivity of a map')
    choi_parser.add_argument('map', help=f"Builtin map ({', '.join(BUILTIN_MAPS)}) or map/channel document")
    choi_parser.add_argument('--samples', type=int, default=DEFAULT_SAMPLES,
                             help='Haar samples for the positivity falsifier')
    choi_parser.add_argument('--seed', type=int, default=DEFAULT_SEED, help='Random seed')
    _add_common(choi_parser)
    _add_map_parameters(choi_parser)

    witness_parser = subparsers.add_parser('witness', help='Apply one positive map as a witness')
    witness_parser.add_argument('state', help='State document path, or - for stdin')
    witness_parser.add_argument('map', help=f"Builtin map ({', '.join(BUILTIN_MAPS)}) or map/channel document")
    witness_parser.add_argument('--side', choices=['left', 'right'], default='right', help='Factor the map acts on')
    witness_parser.add_argument('--spectrum', action='store_true', help='Print the full spectrum')
    _add_common(witness_parser)
    _add_map_parameters(witness_parser)

    gen_parser = subparsers.add_parser('gen', help='Generate a reference state document')
    gen_parser.add_argument('name', choices=GENERATORS, help='State to generate')
    gen_parser.add_argument('--a', type=float, help='Parameter a of rho')
    gen_parser.add_argument('--b', type=float, help='Parameter b of rho')
    gen_parser.add_argument('--dims', type=int, nargs=2, default=[3, 3], metavar=('DIM_A', 'DIM_B'),
                            help='Factor dimensions of separable')
    gen_parser.add_argument('--terms', type=int, default=4, help='Product terms of separable')
    gen_parser.add_argument('--factors', choices=['pure', 'mixed'], default='pure', help='Factor states of separable')
    gen_parser.add_argument('--seed', type=int, default=DEFAULT_SEED, help='Random seed')
    gen_parser.add_argument('--out', default='-', help='Output path, or - for stdout')
    gen_parser.add_argument('--tol', type=float, default=DEFAULT_TOL, help='Numerical tolerance (default 1e-9)')

    return parser


def _map_options(args) -> dict:
    return dict(n=args.n, t=args.t, plus_rows=args.plus_row, minus_rows=args.minus_row)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT, stream=sys.stderr, force=True)

    if not args.command:
        parser.print_help()
        return EXIT_INPUT_ERROR

    cli = AnalystCLI(tol=args.tol, as_json=getattr(args, 'json', False))

    try:
        if args.command == 'analyze':
            rho = cli.load_state(args.state)
            maps = None
            if args.maps:
                acted = rho.dim_b if args.side == 'right' else rho.dim_a
                maps = [cli.resolve_map(name, acted, **_map_options(args))[0] for name in args.maps]
            return cli.analyze(rho, maps, Side(args.side))

        if args.command == 'choi':
            phi, kind = cli.resolve_map(args.map, **_map_options(args))
            return cli.choi(phi, samples=args.samples, seed=args.seed, kind=kind)

        if args.command == 'witness':
            rho = cli.load_state(args.state)
            acted = rho.dim_b if args.side == 'right' else rho.dim_a
            phi, _ = cli.resolve_map(args.map, acted, **_map_options(args))
            return cli.witness(rho, phi, Side(args.side), args.spectrum)

        if args.command == 'gen':
            return cli.generate(args.name, args.out, a=args.a, b=args.b, dims=args.dims, terms=args.terms,
                                factors=args.factors, seed=args.seed)

    except PosmapError as e:
        print(f"❌ {str(e)}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
