"""
Command line front end: JSON documents in, JSON or CSV out.

    python -m app.cli factorize density.json
    python -m app.cli distance phi.json psi.json --gap 1e-5
    python -m app.cli propagation --toeplitz 5
    python -m app.cli geometry3 --check

Exit codes: 0 on success, 1 on invalid input (an {"error", "detail"} object
is written to standard error), 2 on a malformed command line.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

import numpy as np
from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError

from app.core.config import settings
from app.core.errors import InvalidInputError, ToeplitzError
from app.models.schemas import (
    CirculantDTO,
    DistanceDTO,
    EigenvaluesDTO,
    ErrorDTO,
    FRElementDTO,
    MultiplicityDTO,
    PropagationDTO,
    StateCheckDTO,
    TensorRankDTO,
    ToeplitzDTO,
)
from app.services.circulant_service import (
    circulant_eigenvalues,
    circulant_is_positive,
    complete_toeplitz,
    compress_circulant,
    is_prime_order,
    tensor_map_rank,
)
from app.services.decompose_service import det_multiplicity, numerical_rank, vandermonde_decompose
from app.services.factor_service import fejer_riesz_factorize
from app.services.geometry3_service import SAMPLE_KINDS, run_checks, sample_surfaces
from app.services.metric_service import compare_distances
from app.services.opsys_service import build_system, propagation_profile
from app.services.state_service import evaluate, is_pure, root_angles, state_from_density
from app.utils.codec import (
    checks_to_dto,
    circulant_from_dto,
    circulant_to_dto,
    decomposition_to_dto,
    factor_to_dto,
    fr_from_dto,
    fr_to_dto,
    program_to_dto,
    to_pairs,
    toeplitz_from_dto,
    toeplitz_to_dto,
    write_csv,
)

logger = logging.getLogger(__name__)


class CommandFailed(Exception):
    """A command ran to completion but its verdict is negative."""


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text + "\n")
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text + "\n")


def _emit(dto: BaseModel, args: argparse.Namespace) -> None:
    _write(json.dumps(dto.model_dump(mode="json"), sort_keys=True, indent=2), args.out)


def _density(path: str) -> FRElementDTO:
    return FRElementDTO.model_validate_json(_read(path))


def _toeplitz(path: str) -> ToeplitzDTO:
    return ToeplitzDTO.model_validate_json(_read(path))


def cmd_factorize(args: argparse.Namespace) -> None:
    factor = fejer_riesz_factorize(fr_from_dto(_density(args.input)), tol=args.tol)
    _emit(factor_to_dto(factor), args)


def cmd_decompose(args: argparse.Namespace) -> None:
    T = toeplitz_from_dto(_toeplitz(args.input))
    if args.multiplicity:
        _emit(MultiplicityDTO(
            multiplicity=det_multiplicity(T, max_k=args.max_k, step=args.step, seed=args.seed),
            rank=numerical_rank(T, tol=args.tol)
        ), args)
        return
    _emit(decomposition_to_dto(vandermonde_decompose(T, tol=args.tol)), args)


def cmd_state(args: argparse.Namespace) -> None:
    state = state_from_density(fr_from_dto(_density(args.input)), tol=args.tol)
    report = StateCheckDTO(density=fr_to_dto(state.density))
    if args.check_pure:
        report.pure = is_pure(state)
        if report.pure and state.n > 1:
            report.angles = [float(x) for x in root_angles(state)]
    if args.eval:
        report.value = evaluate(state, toeplitz_from_dto(_toeplitz(args.eval)))
    _emit(report, args)


def cmd_distance(args: argparse.Namespace) -> None:
    phi = state_from_density(fr_from_dto(_density(args.phi)), tol=args.tol)
    psi = state_from_density(fr_from_dto(_density(args.psi)), tol=args.tol)
    connes, transport, dominates, dual = compare_distances(
        phi, psi, gap=args.gap, quad_tol=args.quad_tol, with_dual_route=args.dual_route
    )
    _emit(DistanceDTO(
        connes=program_to_dto(connes),
        kantorovich=transport,
        inequality_ok=dominates,
        dual_route=dual
    ), args)


def cmd_circulant(args: argparse.Namespace) -> None:
    if args.action == "tensor-rank":
        if args.n is None:
            raise InvalidInputError("tensor-rank needs --n")
        rank = tensor_map_rank(args.n)
        m = 2 * args.n - 1
        _emit(TensorRankDTO(n=args.n, m=m, rank=rank, full=rank == m * m, prime=is_prime_order(args.n)), args)
        return
    if args.input is None:
        raise InvalidInputError(f"{args.action} needs an input document")
    if args.action == "complete":
        if args.m is None:
            raise InvalidInputError("complete needs --m")
        _emit(circulant_to_dto(complete_toeplitz(toeplitz_from_dto(_toeplitz(args.input)), args.m)), args)
        return
    C = circulant_from_dto(CirculantDTO.model_validate_json(_read(args.input)))
    if args.action == "compress":
        if args.n is None:
            raise InvalidInputError("compress needs --n")
        _emit(toeplitz_to_dto(compress_circulant(C, args.n)), args)
        return
    _emit(EigenvaluesDTO(
        eigenvalues=to_pairs(circulant_eigenvalues(C)),
        positive=circulant_is_positive(C, tol=args.tol)
    ), args)


def cmd_propagation(args: argparse.Namespace) -> None:
    for kind in ("toeplitz", "circulant", "full"):
        size = getattr(args, kind)
        if size is not None:
            prop, dims = propagation_profile(build_system(kind, size), max_k=args.max_k)
            _emit(PropagationDTO(prop=prop, dims=dims), args)
            return


def cmd_geometry3(args: argparse.Namespace) -> None:
    if args.check:
        report = checks_to_dto(run_checks(seed=args.seed, samples=args.samples))
        _emit(report, args)
        if not report.passed:
            failed = [check.name for check in report.checks if not check.passed]
            raise CommandFailed(f"identities failed: {', '.join(failed)}")
        return
    columns, rows = sample_surfaces(args.sample, args.count, seed=args.seed, slice_d=args.slice_d)
    if args.out == "-":
        write_csv(sys.stdout, columns, rows)
        return
    with open(args.out, "w", encoding="utf-8", newline="") as handle:
        write_csv(handle, columns, rows)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gap", type=float, default=settings.gap, help="certified gap of convex programs")
    common.add_argument("--tol", type=float, default=settings.tol, help="relative eigenvalue tolerance")
    common.add_argument("--quad-tol", type=float, default=settings.quad_tol, help="Kantorovich tolerance")
    common.add_argument("--seed", type=int, default=settings.seed)
    common.add_argument("--out", default="-", help='output path, "-" for standard output')

    parser = argparse.ArgumentParser(prog="toeplitz", description="Toeplitz operator system toolkit.")
    commands = parser.add_subparsers(dest="command", required=True)

    factorize = commands.add_parser("factorize", parents=[common], help="Fejer-Riesz factor of a positive density")
    factorize.add_argument("input", help='density JSON, "-" for standard input')
    factorize.set_defaults(handler=cmd_factorize)

    decompose = commands.add_parser("decompose", parents=[common], help="Vandermonde decomposition")
    decompose.add_argument("input", help='Toeplitz JSON, "-" for standard input')
    decompose.add_argument("--multiplicity", action="store_true", help="report the determinant multiplicity")
    decompose.add_argument("--max-k", type=int, default=None)
    decompose.add_argument("--step", type=float, default=1.0)
    decompose.set_defaults(handler=cmd_decompose)

    state = commands.add_parser("state", parents=[common], help="normalize and inspect a state density")
    state.add_argument("input")
    state.add_argument("--check-pure", action="store_true")
    state.add_argument("--eval", metavar="TOEPLITZ_JSON", default=None)
    state.set_defaults(handler=cmd_state)

    distance = commands.add_parser("distance", parents=[common], help="Connes and Kantorovich distances")
    distance.add_argument("phi")
    distance.add_argument("psi")
    distance.add_argument("--dual-route", action="store_true", help="also compute the dual-norm route")
    distance.set_defaults(handler=cmd_distance)

    circulant = commands.add_parser("circulant", parents=[common], help="circulant completion and spectra")
    circulant.add_argument("action", choices=["complete", "compress", "eigenvalues", "tensor-rank"])
    circulant.add_argument("input", nargs="?", default=None)
    circulant.add_argument("--m", type=int, default=None, help="circulant size for complete")
    circulant.add_argument("--n", type=int, default=None, help="Toeplitz size for compress and tensor-rank")
    circulant.set_defaults(handler=cmd_circulant)

    propagation = commands.add_parser("propagation", parents=[common], help="propagation number")
    systems = propagation.add_mutually_exclusive_group(required=True)
    systems.add_argument("--toeplitz", type=int, metavar="N")
    systems.add_argument("--circulant", type=int, metavar="M")
    systems.add_argument("--full", type=int, metavar="N")
    propagation.add_argument("--max-k", type=int, default=8)
    propagation.set_defaults(handler=cmd_propagation)

    geometry3 = commands.add_parser("geometry3", parents=[common], help="n=3 cone and state space")
    modes = geometry3.add_mutually_exclusive_group(required=True)
    modes.add_argument("--check", action="store_true", help="run the sampled identities")
    modes.add_argument("--sample", choices=sorted(SAMPLE_KINDS), help="write a CSV point cloud")
    geometry3.add_argument("--count", type=int, default=500)
    geometry3.add_argument("--samples", type=int, default=1000, help="samples per identity for --check")
    geometry3.add_argument("--slice-d", type=float, default=-0.4)
    geometry3.set_defaults(handler=cmd_geometry3)
    return parser


def _fail(error: str, detail: str) -> int:
    sys.stderr.write(ErrorDTO(error=error, detail=detail).model_dump_json() + "\n")
    return 1


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    logging.basicConfig(level=settings.log_level, stream=sys.stderr)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        args.handler(args)
    except ValidationError as exc:
        return _fail("ValidationError", str(exc))
    except ToeplitzError as exc:
        return _fail(type(exc).__name__, str(exc))
    except CommandFailed as exc:
        return _fail("CheckFailed", str(exc))
    except OSError as exc:
        return _fail(type(exc).__name__, str(exc))
    except (np.linalg.LinAlgError, ArithmeticError, ValueError) as exc:
        logger.debug("numerical failure", exc_info=True)
        return _fail(type(exc).__name__, str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
