"""Command-line front-end: noiseless {moments,bound,plan,verify,curves}."""

import argparse
import logging
import sys
from dataclasses import replace

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape

from . import __version__
from .bounds_binomial import BinomialCase, binomial_delta_given_eps, binomial_eps_given_delta
from .config import (
    BERRY_ESSEEN_SHARP,
    BERRY_ESSEEN_STATED,
    AccountingConfig,
)
from .curves import emit_curves, figure_preset, noise_regimes, with_overrides
from .errors import InvariantError, NoiselessError, PreconditionError
from .model import AdversaryModel, DataVectorSpec, PrivacyBound
from .oracle import exact_np_audit, mc_estimate_delta
from .planner import TheoremResult, plan, theorem_bound
from .report import bound_document, emit, moments_document, plan_document, rounded
from .schema import ConfigBundle, load_bundle
from .synergy import NoiseFamily
from .themes import DEFAULT_THEME, THEME_MAP

logger = logging.getLogger(__name__)

BE_CONSTANTS = {1.12: BERRY_ESSEEN_STATED, 1.1182: BERRY_ESSEEN_SHARP}


def _indices(text: str) -> frozenset[int]:
    try:
        return frozenset(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated indices, got {text!r}") from None


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config file (see docs/config-schema.md)")
    common.add_argument(
        "--format", choices=["text", "structured"], default="text", help="report format"
    )
    common.add_argument(
        "--be-constant",
        type=float,
        choices=sorted(BE_CONSTANTS),
        default=1.12,
        help="Berry-Esseen factor 2C (default: 1.12)",
    )
    common.add_argument(
        "--stein-k", type=int, choices=[26, 28], default=28, help="Stein constant K (default: 28)"
    )
    common.add_argument("--seed", type=int, default=0, help="seed for sampling (default: 0)")
    common.add_argument("--theme", choices=sorted(THEME_MAP), default=DEFAULT_THEME)
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for progress, -vv for detail"
    )
    return common


def _data_options(parser: argparse.ArgumentParser, with_model: bool = True) -> None:
    if with_model:
        parser.add_argument(
            "--model",
            choices=["auto", "binomial", "independent", "dependent"],
            default="auto",
            help="which bound to apply (auto: by dependency bound)",
        )
    parser.add_argument("--total-variance", type=float, help="Var of the whole sum")
    parser.add_argument("--dependency-bound", type=int, help="max dependency neighbourhood D")
    parser.add_argument("--gamma", type=float, help="fraction of records the adversary knows")
    parser.add_argument("--compromised", type=_indices, help="explicit compromised indices, e.g. 0,4,7")
    parser.add_argument(
        "--remaining-total-variance",
        type=float,
        help="Var of the sum of the uncompromised records (dependent data)",
    )


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="noiseless",
        description="Noiseless-privacy (epsilon, delta) accounting for sum aggregation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("moments", parents=[common], help="per-record and total moments")

    bound = commands.add_parser("bound", parents=[common], help="compute an (epsilon, delta) bound")
    _data_options(bound)
    bound.add_argument("--delta", type=float, help="binomial: delta to find epsilon for")
    bound.add_argument("--epsilon", type=float, help="binomial: epsilon to find delta for")
    bound.add_argument(
        "--delta-adversarial",
        action="store_true",
        help="also report the compromised set that maximizes delta",
    )

    planner = commands.add_parser("plan", parents=[common], help="walk the privacy flowchart")
    _data_options(planner, with_model=False)
    planner.add_argument("--target-epsilon", type=float)
    planner.add_argument("--target-delta", type=float)
    planner.add_argument("--sensitivity", type=float, help="sensitivity when no config is given")
    planner.add_argument(
        "--noise-family",
        choices=[family.value for family in NoiseFamily],
        default=NoiseFamily.GENERIC.value,
    )

    verify = commands.add_parser("verify", parents=[common], help="check a bound with the oracle")
    _data_options(verify)
    verify.add_argument("--epsilon", type=float, help="epsilon to check (not below the bound's)")
    verify.add_argument("--delta", type=float, help="binomial: delta to find epsilon for")
    method = verify.add_mutually_exclusive_group()
    method.add_argument("--exact", action="store_true", help="exact convolution oracle (default)")
    method.add_argument("--mc", action="store_true", help="Monte Carlo estimate")
    verify.add_argument("--samples", type=int, default=100_000)
    verify.add_argument(
        "--insert-record",
        type=int,
        default=0,
        help="record group whose law the inserted record follows (default: 0)",
    )

    curves = commands.add_parser("curves", parents=[common], help="emit a figure's curve as CSV")
    curves.add_argument("--figure", type=int, required=True, help="1, 2, 3, 4 or 6")
    curves.add_argument("--n-min", type=int)
    curves.add_argument("--n-max", type=int)
    curves.add_argument("--points", type=int)
    curves.add_argument("--epsilon", type=float)
    curves.add_argument("--p", type=float)
    curves.add_argument("--output", help="write the CSV here instead of stdout")
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_time=False, show_path=False)],
        force=True,
    )


def accounting_config(args: argparse.Namespace) -> AccountingConfig:
    return AccountingConfig(
        berry_esseen_factor=BE_CONSTANTS[args.be_constant],
        stein_constant=args.stein_k,
    )


def _bundle(args: argparse.Namespace, required: bool = True) -> ConfigBundle | None:
    if args.config is None:
        if required:
            raise InvariantError("this command needs --config", field="config")
        return None
    return load_bundle(args.config)


def _require_spec(bundle: ConfigBundle) -> DataVectorSpec:
    if bundle.spec is None:
        raise InvariantError("this command needs records in the config", field="records")
    return bundle.spec


def _apply_overrides(
    bundle: ConfigBundle, args: argparse.Namespace
) -> tuple[DataVectorSpec, AdversaryModel]:
    """Command-line values replace those of the config file."""
    spec = _require_spec(bundle)
    if args.dependency_bound is not None or args.total_variance is not None:
        bound = spec.dependency_bound if args.dependency_bound is None else args.dependency_bound
        variance = args.total_variance
        if variance is None and bound > 1 and spec.dependency_bound > 1:
            variance = spec.total_variance
        spec = replace(spec, dependency_bound=bound, total_variance=variance)
    adversary = bundle.adversary
    adversary = AdversaryModel(
        dependency_bound=spec.dependency_bound,
        gamma=args.gamma if args.gamma is not None else adversary.gamma,
        compromised=args.compromised if args.compromised is not None else adversary.compromised,
    )
    adversary.check_against(spec)
    return spec, adversary


def _remaining_variance(bundle: ConfigBundle, args: argparse.Namespace) -> float | None:
    if args.remaining_total_variance is not None:
        return args.remaining_total_variance
    return bundle.remaining_total_variance


def _binomial_bound(
    spec: DataVectorSpec,
    adversary: AdversaryModel,
    delta: float | None,
    epsilon: float | None,
) -> PrivacyBound:
    if adversary.gamma > 0 or adversary.compromised:
        raise InvariantError("the binomial model has no compromised variant", field="gamma")
    case = BinomialCase.from_spec(spec)
    if delta is not None:
        return binomial_eps_given_delta(case, delta)
    if epsilon is not None:
        return binomial_delta_given_eps(case, epsilon)
    raise InvariantError("the binomial model needs --delta or --epsilon", field="model")


def _theorem(
    args: argparse.Namespace,
    bundle: ConfigBundle,
    spec: DataVectorSpec,
    adversary: AdversaryModel,
    config: AccountingConfig,
    search_delta_adversary: bool = False,
) -> TheoremResult:
    if args.model == "independent" and spec.dependency_bound != 1:
        raise InvariantError("independent model needs dependency_bound = 1", field="model")
    return theorem_bound(
        spec,
        adversary,
        _remaining_variance(bundle, args),
        config,
        search_delta_adversary=search_delta_adversary,
        force_dependent=args.model == "dependent",
    )


def cmd_moments(args, console: Console, config: AccountingConfig) -> int:
    spec = _require_spec(_bundle(args))
    document = moments_document(spec, config.significant_digits)
    emit(document, args.format == "structured", console, "moments", config.significant_digits)
    return 0


def cmd_bound(args, console: Console, config: AccountingConfig) -> int:
    bundle = _bundle(args)
    spec, adversary = _apply_overrides(bundle, args)
    digits = config.significant_digits
    if args.model == "binomial":
        try:
            bound = _binomial_bound(spec, adversary, args.delta, args.epsilon)
        except PreconditionError as exc:
            logger.debug("minimal admissible delta: %r", exc.minimal_delta)
            raise
        document = {"model": "binomial", "n": spec.n, **bound_document(bound, digits)}
    else:
        result = _theorem(args, bundle, spec, adversary, config, args.delta_adversarial)
        document = {
            "model": args.model,
            "n": spec.n,
            "compromised": list(result.plan.selected),
            **bound_document(result.bound, digits),
        }
        if result.supplementary is not None:
            document["supplementary"] = bound_document(result.supplementary, digits)
    emit(document, args.format == "structured", console, "bound", digits)
    return 0


def cmd_plan(args, console: Console, config: AccountingConfig) -> int:
    bundle = _bundle(args, required=False)
    if bundle is None or bundle.spec is None:
        sensitivity = args.sensitivity or (bundle.sensitivity if bundle else None)
        spec, adversary = None, bundle.adversary if bundle else AdversaryModel()
        remaining = None
    else:
        spec, adversary = _apply_overrides(bundle, args)
        sensitivity = spec.sensitivity
        remaining = _remaining_variance(bundle, args)
    target_epsilon = args.target_epsilon
    target_delta = args.target_delta
    if bundle is not None:
        target_epsilon = target_epsilon if target_epsilon is not None else bundle.target_epsilon
        target_delta = target_delta if target_delta is not None else bundle.target_delta
    report = plan(
        spec,
        adversary,
        target_epsilon=target_epsilon,
        target_delta=target_delta,
        sensitivity=sensitivity,
        remaining_total_variance=remaining,
        noise_family=NoiseFamily(args.noise_family),
        config=config,
    )
    digits = config.significant_digits
    emit(plan_document(report, digits), args.format == "structured", console, "plan", digits)
    return 0


def _modal_value(spec: DataVectorSpec, index: int) -> float:
    record = spec.records[spec.group_of(index)]
    if not record.is_finite:
        return record.moments.mean
    value, _ = max(record.pmf(), key=lambda pair: pair[1])
    return value


def cmd_verify(args, console: Console, config: AccountingConfig) -> int:
    bundle = _bundle(args)
    spec, adversary = _apply_overrides(bundle, args)
    fixed: dict[int, float] = {}
    if args.model == "binomial":
        epsilon_arg = None if args.delta is not None else args.epsilon
        bound = _binomial_bound(spec, adversary, args.delta, epsilon_arg)
    else:
        result = _theorem(args, bundle, spec, adversary, config)
        bound = result.bound
        # The adversary knows the compromised values; condition on their modes.
        fixed = {i: _modal_value(spec, i) for i in result.plan.selected}
    epsilon = bound.epsilon if args.epsilon is None else args.epsilon
    if epsilon < bound.epsilon:
        raise InvariantError(
            f"{epsilon:.12g} is below the bound's epsilon {bound.epsilon:.12g}; "
            "the claimed delta does not cover it",
            field="epsilon",
        )
    if not 0 <= args.insert_record < len(spec.records):
        raise InvariantError("no such record group", field="insert_record")
    insert_spec = spec.records[args.insert_record].with_count(1)
    digits = config.significant_digits
    if args.mc:
        estimate = mc_estimate_delta(
            spec, epsilon, insert_spec, args.samples, args.seed, fixed, config
        )
        measured, worst = estimate.estimate, estimate.worst_case
        method = "monte-carlo estimate (not a certificate)"
        passed = measured <= bound.delta
        extra = {"ci95": rounded(estimate.ci95, digits), "samples": estimate.samples}
    else:
        audit = exact_np_audit(spec, epsilon, insert_spec, fixed, config)
        measured, worst = audit.delta, audit.worst_case
        method = "exact"
        passed = measured <= bound.delta + config.soundness_slack
        extra = {"cases_checked": audit.cases_checked}
    document = {
        "verdict": "PASS" if passed else "FAIL",
        "method": method,
        "epsilon": rounded(epsilon, digits),
        "claimed_delta": rounded(bound.delta, digits),
        "measured_delta": rounded(measured, digits),
        **extra,
        "worst_case": worst.describe(),
        "conditioned_on": sorted(fixed),
        "bound": bound_document(bound, digits),
    }
    emit(document, args.format == "structured", console, "verify", digits)
    return 0 if passed else 1


def cmd_curves(args, console: Console, config: AccountingConfig) -> int:
    preset = figure_preset(args.figure)
    params = with_overrides(
        args.figure,
        n_min=args.n_min,
        n_max=args.n_max,
        points=args.points,
        epsilon=args.epsilon,
        p=args.p,
    )
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as stream:
            emit_curves(args.figure, stream, params, config)
    else:
        emit_curves(args.figure, sys.stdout, params, config)
    if preset.with_baseline:
        regimes = noise_regimes(params)
        logger.info(
            "%s: noise below baseline from n = %s, no noise from n = %s",
            preset.title,
            regimes.synergy_from,
            regimes.noiseless_from,
        )
    return 0


COMMANDS = {
    "moments": cmd_moments,
    "bound": cmd_bound,
    "plan": cmd_plan,
    "verify": cmd_verify,
    "curves": cmd_curves,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    console = Console(theme=THEME_MAP[args.theme], file=sys.stdout)
    errors = Console(theme=THEME_MAP[args.theme], stderr=True)
    try:
        return COMMANDS[args.command](args, console, accounting_config(args))
    except NoiselessError as exc:
        errors.print(f"[fail]error:[/fail] {escape(str(exc))}")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
