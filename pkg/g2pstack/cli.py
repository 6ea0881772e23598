"""Command-line entry point: `python app.py <subcommand> ...`.

Data goes to stdout or --out files; progress and diagnostics go to stderr.
Exit codes: 0 success, 1 usage error, 2 data or validation error, 3 internal error.
"""

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .align import (
    align_corpus,
    align_parallel,
    estimate_associations,
    format_aligned,
    group_by_word,
    load_aligned,
    parallel_from_aligned,
    suggest_compounds,
    unalignable_report,
)
from .config import LEARNER_KINDS, load_settings
from .errors import G2PStackError, UsageError
from .evaluation import frame_to_tsv, per_phoneme_errors, score_predictions
from .instances import InstanceSchema, format_instances, translation_instances, window, window_instances
from .learners import RuleListModel, learner_params, load_model, save_model, train
from .lexicon import filter_alignable, load_inventory, load_lexicon, pair_lexicons
from .log import configure_logging, get_logger
from .stacking import Architecture, make_folds, plan_from_settings, run_plan
from .synth import SyntheticSpec, default_dialect_rules, generate_synthetic, write_synthetic
from .tbedl import (
    RuleProgram,
    apply_rules,
    corpus_pairs,
    difference_recovery,
    explain_rule,
    format_rules,
    learn_tbedl,
    load_rules,
    overlap_report,
    prefix_curve,
    split_pairs,
)
from .translation import train_translator, translation_overlap

logger = get_logger(__name__)

DEFAULT_DATA_DIR = "data"

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so main() owns the exit code."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage().strip()}")


# -------------------------------------------------------------------------------------------------
# Helpers
# -------------------------------------------------------------------------------------------------


def _emit(text, out=None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        logger.info("wrote %s", out)
    else:
        sys.stdout.write(text)


def _data_path(args, name, default_file):
    explicit = getattr(args, name, None)
    return Path(explicit) if explicit else Path(args.data) / default_file


def _load_corpus(args, settings):
    """Both variants aligned: gold alignments with --pre-aligned, else aligned here."""
    if args.pre_aligned:
        return parallel_from_aligned(
            load_aligned(_data_path(args, "a_aligned", "a.aligned.tsv")),
            load_aligned(_data_path(args, "b_aligned", "b.aligned.tsv")),
        )
    inventory_a = load_inventory(_data_path(args, "inventory", "inventory.txt"))
    inventory_b = load_inventory(args.inventory_b) if args.inventory_b else inventory_a
    lexicon = pair_lexicons(
        load_lexicon(_data_path(args, "a", "a.tsv"), inventory_a),
        load_lexicon(_data_path(args, "b", "b.tsv"), inventory_b),
    )
    return align_parallel(lexicon, inventory_a, inventory_b,
                          iterations=settings.em_iters, null_penalty=settings.null_penalty)


def _read_words(path):
    words = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            word = line.rstrip("\n").split("\t", 1)[0].strip()
            if word and not word.startswith("#") and word not in words:
                words.append(word)
    return words


def _training_instances(aligned, schema):
    word_ids = {word: i for i, word in enumerate(sorted({e.word for e in aligned}))}
    instances = []
    for entry in aligned:
        instances += window_instances(entry, schema, word_ids[entry.word])
    return instances


# -------------------------------------------------------------------------------------------------
# Subcommands
# -------------------------------------------------------------------------------------------------


def cmd_align(args, settings):
    inventory = load_inventory(args.inventory)
    entries = load_lexicon(args.lexicon, inventory)
    kept, dropped = filter_alignable(entries, inventory)
    model = estimate_associations(kept, settings.em_iters, inventory=inventory, null_penalty=settings.null_penalty)
    result = align_corpus(kept, model, inventory)
    for word, index, message in result.failures:
        logger.warning("%s (transcription %d): %s", word, index + 1, message)
    if args.suggest_compounds and dropped:
        for (left, right), count in suggest_compounds(dropped, inventory, args.suggest_compounds):
            logger.info("compound candidate /%s %s/ seen %d times", left, right, count)
    if args.report:
        _emit(unalignable_report(dropped, result.failures), args.report)
    _emit(format_aligned(result.aligned), args.out)
    return EXIT_OK


def cmd_instances(args, settings):
    schema = InstanceSchema()
    aligned = load_aligned(args.aligned)
    if args.pair:
        other = group_by_word(load_aligned(args.pair))
        groups = group_by_word(aligned)
        instances = []
        for word_id, word in enumerate(sorted(groups.keys() & other.keys())):
            instances += translation_instances(groups[word][0], other[word][0], schema, word_id)
    else:
        instances = _training_instances(aligned, schema)
    _emit(format_instances(instances), args.out)
    return EXIT_OK


def cmd_train(args, settings):
    kind = args.learner or settings.component
    schema = InstanceSchema()
    instances = _training_instances(load_aligned(args.aligned), schema)
    model = train(kind, instances, schema, **learner_params(kind, settings))
    save_model(model, args.out)
    logger.info("trained %s on %d instances", kind, len(instances))
    return EXIT_OK


def cmd_predict(args, settings):
    model = load_model(args.model)
    lines = []
    for word in _read_words(args.input):
        orthography = tuple(word)
        predicted = model.classify_many(window(orthography, i, model.schema) for i in range(len(orthography)))
        lines.append(f"{word}\t{' '.join(predicted)}\n")
    _emit("".join(lines), args.out)
    return EXIT_OK


def cmd_eval(args, settings):
    gold = group_by_word(load_aligned(args.gold))
    predicted = {word: group[0].phonemes for word, group in group_by_word(load_aligned(args.predicted)).items()}
    score = score_predictions(gold, predicted)
    if args.json:
        text = json.dumps(score._asdict(), sort_keys=True, indent=2) + "\n"
    else:
        text = (
            f"words\t{score.word_count}\n"
            f"phonemes\t{score.phoneme_count}\n"
            f"phoneme_acc\t{score.phoneme_accuracy:.6f}\n"
            f"word_acc\t{score.word_accuracy:.6f}\n"
        )
    if args.per_phoneme:
        text += "\n" + frame_to_tsv(per_phoneme_errors(gold, predicted))
    _emit(text, args.out)
    return EXIT_OK


def cmd_stack_run(args, settings):
    corpus = _load_corpus(args, settings)
    plan = plan_from_settings(Architecture(args.arch), args.target, settings)
    folds = make_folds(corpus.shared_words, settings.folds, settings.seed)
    result = run_plan(plan, corpus, folds, settings, jobs=settings.effective_jobs())
    logger.info("%s -> %s: phoneme %.4f (sd %.4f), word %.4f",
                args.arch, args.target, result.mean_phoneme, result.stddev_phoneme, result.mean_word)
    _emit(result.to_json() if args.json else result.to_tsv(), args.out)
    if args.plot:
        from .plots import plot_folds

        plot_folds(result, args.plot, title=f"{args.arch} ({args.target})")
    return EXIT_OK


def _log_overlap(label, pairs, program):
    before = overlap_report(pairs)
    after = overlap_report(pairs, program)
    logger.info("%s: word overlap %.4f -> %.4f, phoneme overlap %.4f -> %.4f",
                label, before.word_overlap, after.word_overlap, before.phoneme_overlap, after.phoneme_overlap)


def _split(args, settings, pairs):
    if args.holdout:
        return split_pairs(pairs, args.holdout, settings.seed)
    return pairs, []


def cmd_tbedl_learn(args, settings):
    pairs = corpus_pairs(_load_corpus(args, settings), target=args.target)
    train_pairs, test_pairs = _split(args, settings, pairs)
    program = learn_tbedl(train_pairs, threshold=settings.threshold)
    _log_overlap("training", train_pairs, program)
    evaluation_pairs = test_pairs or train_pairs
    if test_pairs:
        _log_overlap("held out", test_pairs, program)
    recovery = difference_recovery(evaluation_pairs, program)
    logger.info("recovered %.1f%% of differing words and %.1f%% of differing phonemes",
                100 * recovery.word_recovery, 100 * recovery.phoneme_recovery)
    _emit(format_rules(program), args.out)

    if args.curve or args.plot:
        curve = prefix_curve(evaluation_pairs, program, args.step)
        if args.curve:
            _emit(frame_to_tsv(curve), args.curve)
        if args.plot:
            from .plots import plot_prefix_curve

            plot_prefix_curve(curve, args.plot)
    return EXIT_OK


def cmd_tbedl_apply(args, settings):
    program = load_rules(args.rules)
    lines = []
    for entry in load_aligned(args.aligned):
        lines.append(f"{entry.word}\t{' '.join(apply_rules(program, entry.phonemes))}\n")
    _emit("".join(lines), args.out)
    return EXIT_OK


def cmd_synth(args, settings):
    overrides = {"word_count": args.words, "seed": settings.seed, "ambiguity_rate": args.ambiguity,
                 "loan_rate": args.loan_rate}
    if args.no_dialect:
        overrides["dialect_rules"] = RuleProgram()
    else:
        overrides["dialect_rules"] = default_dialect_rules()
    corpus = generate_synthetic(SyntheticSpec(**overrides))
    paths = write_synthetic(corpus, args.out)
    logger.info("synthetic dialect pair written to %s", paths["a"].parent)
    return EXIT_OK


def cmd_rules_learn(args, settings):
    pairs = corpus_pairs(_load_corpus(args, settings), target=args.target)
    train_pairs, test_pairs = _split(args, settings, pairs)
    model = train_translator(train_pairs)
    for label, subset in (("training", train_pairs), ("held out", test_pairs)):
        if subset:
            before, after = overlap_report(subset), translation_overlap(model, subset)
            logger.info("%s: word overlap %.4f -> %.4f, phoneme overlap %.4f -> %.4f", label,
                        before.word_overlap, after.word_overlap, before.phoneme_overlap, after.phoneme_overlap)
    save_model(model, args.out)
    sys.stdout.write(model.render(args.max_values))
    return EXIT_OK


def cmd_rules_print(args, settings):
    if bool(args.model) == bool(args.rules):
        raise UsageError("rules print needs exactly one of --model or --rules")
    if args.model:
        model = load_model(args.model)
        if not isinstance(model, RuleListModel):
            raise UsageError(f"{args.model} holds a {model.kind} model, not a rule list")
        _emit(model.render(args.max_values))
        return EXIT_OK
    program = load_rules(args.rules)
    lines = [f"# threshold={program.threshold}\n"]
    for i, rule in enumerate(program.rules, start=1):
        lines.append(f"{i}. {rule.render()}\n   {explain_rule(rule)}\n")
    _emit("".join(lines))
    return EXIT_OK


# -------------------------------------------------------------------------------------------------
# Parser
# -------------------------------------------------------------------------------------------------


def _common_options():
    """Options accepted both before and after the subcommand."""
    common = _Parser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="flat key=value settings file")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="parallel workers (0 = all cores)")
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    common.add_argument("-q", "--quiet", action="store_true", default=argparse.SUPPRESS)
    return common


def _corpus_options(parser):
    parser.add_argument("--data", default=DEFAULT_DATA_DIR, help="directory holding a.tsv, b.tsv, inventory.txt")
    parser.add_argument("--a", help="variant A lexicon (default <data>/a.tsv)")
    parser.add_argument("--b", help="variant B lexicon (default <data>/b.tsv)")
    parser.add_argument("--inventory", help="phoneme inventory (default <data>/inventory.txt)")
    parser.add_argument("--inventory-b", help="separate inventory for variant B")
    parser.add_argument("--pre-aligned", action="store_true", help="use the gold *.aligned.tsv files")
    parser.add_argument("--a-aligned", help="aligned variant A (with --pre-aligned)")
    parser.add_argument("--b-aligned", help="aligned variant B (with --pre-aligned)")
    parser.add_argument("--em-iters", type=int, default=None)
    parser.add_argument("--null-penalty", type=float, default=None)


def _learner_options(parser):
    parser.add_argument("--k", type=int, default=None)
    parser.add_argument("--weighting", choices=["ig", "gainratio"], default=None)
    parser.add_argument("--max-iterations", type=int, default=None)
    parser.add_argument("--tolerance", type=float, default=None)


def build_parser():
    common = _common_options()
    parser = _Parser(prog="g2pstack", description="Grapheme-to-phoneme learning and dialect stacking toolkit",
                     parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("align", parents=[common], help="align a lexicon (null insertion, compounds)")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--inventory", required=True)
    p.add_argument("--em-iters", type=int, default=None)
    p.add_argument("--null-penalty", type=float, default=None)
    p.add_argument("--suggest-compounds", type=int, default=0, metavar="N")
    p.add_argument("--report", help="write the unalignable entries and their reasons (TSV)")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_align)

    p = sub.add_parser("instances", parents=[common], help="write windowed instances")
    p.add_argument("--aligned", required=True)
    p.add_argument("--pair", help="aligned variant B: write translation instances instead")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_instances)

    p = sub.add_parser("train", parents=[common], help="train a learner on an aligned lexicon")
    p.add_argument("--learner", choices=LEARNER_KINDS)
    p.add_argument("--aligned", required=True)
    p.add_argument("--out", required=True)
    _learner_options(p)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="transcribe words with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="word list or lexicon (first column is used)")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("eval", parents=[common], help="score predictions against gold alignments")
    p.add_argument("--gold", required=True)
    p.add_argument("--predicted", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--per-phoneme", action="store_true")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_eval)

    stack = sub.add_parser("stack", parents=[common], help="stacking experiments")
    stack_sub = stack.add_subparsers(dest="action", parser_class=_Parser)
    p = stack_sub.add_parser("run", parents=[common], help="cross-validate one architecture")
    p.add_argument("--arch", choices=[a.value for a in Architecture], default="single")
    p.add_argument("--target", choices=["a", "b"], default="b")
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--inner-folds", type=int, default=None)
    p.add_argument("--component", choices=LEARNER_KINDS, default=None)
    p.add_argument("--combiner", choices=LEARNER_KINDS, default=None)
    p.add_argument("--meta-learners", default=None, help="comma-separated learner kinds")
    p.add_argument("--with-spelling", action="store_const", const=True, default=None)
    p.add_argument("--resubstitution", action="store_const", const=True, default=None,
                   help="train combiners on resubstitution predictions (optimistic)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--plot", help="write a fold accuracy chart (PNG)")
    p.add_argument("--out")
    _corpus_options(p)
    _learner_options(p)
    p.set_defaults(handler=cmd_stack_run)

    tbedl = sub.add_parser("tbedl", parents=[common], help="transformation-based rule learning")
    tbedl_sub = tbedl.add_subparsers(dest="action", parser_class=_Parser)
    p = tbedl_sub.add_parser("learn", parents=[common], help="learn rules turning one variant into the other")
    p.add_argument("--target", choices=["a", "b"], default="b", help="variant the rules rewrite into")
    p.add_argument("--threshold", type=int, default=None)
    p.add_argument("--holdout", type=float, default=0.0, help="held-out fraction, e.g. 0.1")
    p.add_argument("--curve", help="write the rule-prefix learning curve (TSV)")
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--plot", help="write the learning curve chart (PNG)")
    p.add_argument("--out")
    _corpus_options(p)
    p.set_defaults(handler=cmd_tbedl_learn)
    p = tbedl_sub.add_parser("apply", parents=[common], help="apply a rule file to an aligned lexicon")
    p.add_argument("--rules", required=True)
    p.add_argument("--aligned", required=True)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_tbedl_apply)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic dialect pair")
    p.add_argument("--words", type=int, default=5000)
    p.add_argument("--ambiguity", type=float, default=0.05)
    p.add_argument("--loan-rate", type=float, default=0.4, help="share of stems whose g reads /Z/ in variant A")
    p.add_argument("--no-dialect", action="store_true", help="no dialect rules (variant B = variant A)")
    p.add_argument("--out", default=DEFAULT_DATA_DIR)
    p.set_defaults(handler=cmd_synth)

    rules = sub.add_parser("rules", parents=[common], help="decision-tree rules for variant translation")
    rules_sub = rules.add_subparsers(dest="action", parser_class=_Parser)
    p = rules_sub.add_parser("learn", parents=[common], help="learn a rule list translating one variant into the other")
    p.add_argument("--target", choices=["a", "b"], default="b", help="variant the rule list translates into")
    p.add_argument("--holdout", type=float, default=0.0)
    p.add_argument("--max-values", type=int, default=None)
    p.add_argument("--out", required=True)
    _corpus_options(p)
    p.set_defaults(handler=cmd_rules_learn)
    p = rules_sub.add_parser("print", parents=[common], help="render a rule-list model or TBEDL rule file")
    p.add_argument("--model")
    p.add_argument("--rules")
    p.add_argument("--max-values", type=int, default=None)
    p.set_defaults(handler=cmd_rules_print)

    return parser


_SETTING_FLAGS = (
    "seed", "jobs", "folds", "inner_folds", "null_penalty", "em_iters", "threshold", "k", "weighting",
    "max_iterations", "tolerance", "with_spelling", "resubstitution", "component", "combiner", "meta_learners",
)


def _settings(args):
    overrides = {name: getattr(args, name, None) for name in _SETTING_FLAGS}
    return load_settings(getattr(args, "config", None), overrides)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        verbosity = -1 if getattr(args, "quiet", False) else getattr(args, "verbose", 0)
        configure_logging(verbosity)
        if not hasattr(args, "handler"):
            raise UsageError(parser.format_usage().strip())
        settings = _settings(args)
        return args.handler(args, settings)
    except SystemExit as exc:
        # --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    except UsageError as exc:
        sys.stderr.write(f"⚠️ {exc}\n")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        sys.stderr.write(f"🚨 File not found: {exc.filename or exc}\n")
        return EXIT_DATA
    except (G2PStackError, OSError) as exc:
        sys.stderr.write(f"🚨 {exc}\n")
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        logger.debug("internal error", exc_info=True)
        sys.stderr.write(f"💥 Internal error: {exc!r}\n")
        return EXIT_INTERNAL
