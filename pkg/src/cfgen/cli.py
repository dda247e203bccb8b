"""Command-line entry point.

Subcommands cover each pipeline stage plus an end-to-end ``pipeline`` run.
All randomness flows from a single ``--seed``; every run writes a manifest
echoing its resolved configuration so outputs are reproducible byte for
byte. Structured JSON diagnostics (one object per skipped or flagged item)
go to stderr; data only ever goes to files.

Option precedence is flag > environment variable (``CFGEN_*``) > default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import assembly, conllu, corpus, evaluate, lexicons, mrf, reinflect, selection, swap

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2


class InputError(ValueError):
    """User-facing problem: bad paths, malformed files, bad flags."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise InputError(message)


def log_event(**fields) -> None:
    print(json.dumps(fields, sort_keys=True, ensure_ascii=False), file=sys.stderr)


def _env(name: str, cast, default):
    raw = os.environ.get(f"CFGEN_{name}")
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise InputError(f"bad value for CFGEN_{name}: {raw!r}")


def _resolved(value, env_name: str, cast, default):
    if value is not None:
        return value
    return _env(env_name, cast, default)


def _write_manifest(out_dir: Path, command: str, config: dict, counts: dict) -> dict:
    manifest = {"command": command, "config": config, "counts": counts}
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True, ensure_ascii=False)
        handle.write("\n")
    return manifest


def _load_animacy(path) -> lexicons.AnimacyLexicon:
    path = path or lexicons.default_data_path("animacy.tsv")
    return lexicons.AnimacyLexicon.load(path)


def _load_lang_resources(lang: str, args):
    animacy = _load_animacy(getattr(args, "animacy", None))
    inflections_path = getattr(args, "inflections", None) or lexicons.default_data_path(
        lang, "inflections.tsv"
    )
    rules_path = getattr(args, "suffix_rules", None) or lexicons.default_data_path(
        lang, "suffix_rules.tsv"
    )
    contractions_path = getattr(args, "contractions", None) or lexicons.default_data_path(
        lang, "contractions.tsv"
    )
    inflections = lexicons.InflectionLexicon.load(inflections_path).with_animacy_forms(
        animacy, lang
    )
    rules = lexicons.load_suffix_rules(rules_path)
    contractions = lexicons.load_contractions(contractions_path)
    return animacy, inflections, rules, contractions


def _read_corpus(args) -> list[corpus.ParallelPair]:
    return corpus.read_parallel_corpus(
        args.src_conllu, args.tgt_conllu, args.lang, repair_multiroot=args.repair_multiroot
    )


def _reasons_str(verdict) -> str:
    return ",".join(sorted(r.value for r in verdict.reasons))


def _write_rejections(path: Path, rejected) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for uid, verdict in rejected:
            handle.write(f"{uid}\t{_reasons_str(verdict)}\n")


def _write_selections_tsv(path: Path, selections) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for sel in selections:
            handle.write(
                f"{sel.pair.uid}\t{sel.pronoun_index}\t{sel.profession_index}\t{sel.profession_lemma}\n"
            )


def _read_selections_tsv(path) -> list[tuple[str, int, int, str]]:
    rows = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise InputError(f"{path}: line {line_no}: expected 4 columns")
            rows.append((parts[0], int(parts[1]), int(parts[2]), parts[3]))
    return rows


def _pool_map(func, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


# --------------------------------------------------------------------------
# subcommand: select


def _run_select_gendered(pairs, animacy, cap, seed, out_dir: Path):
    selections = []
    rejected = []
    for pair in pairs:
        verdict, sel = selection.filter_gendered(pair, animacy)
        if sel is not None:
            selections.append(sel)
        else:
            rejected.append((pair.uid, verdict))
            log_event(event="reject", pair=pair.uid, reasons=sorted(r.value for r in verdict.reasons))
    sampled = selection.sample_per_profession(selections, cap=cap, seed=seed)
    conllu.write_conllu([s.pair.src for s in sampled], out_dir / "accepted_src.conllu")
    conllu.write_conllu([s.pair.tgt for s in sampled], out_dir / "accepted_tgt.conllu")
    _write_selections_tsv(out_dir / "selections.tsv", sampled)
    _write_rejections(out_dir / "rejections.tsv", rejected)
    return {
        "input_pairs": len(pairs),
        "accepted": len(selections),
        "rejected": len(rejected),
        "sampled": len(sampled),
    }


def _run_select_neutral(pairs, sample_size, seed, out_dir: Path):
    rejected = [
        (pair.uid, verdict)
        for pair in pairs
        if not (verdict := selection.filter_neutral(pair)).accepted
    ]
    sampled = selection.random_sample(pairs, sample_size, seed=seed)
    corpus.write_pairs_tsv(sampled, out_dir / "random.tsv")
    _write_rejections(out_dir / "rejections.tsv", rejected)
    return {
        "input_pairs": len(pairs),
        "rejected": len(rejected),
        "sampled": len(sampled),
    }


def cmd_select(args) -> int:
    seed = _resolved(args.seed, "SEED", int, 0)
    cap = _resolved(args.cap, "CAP", int, selection.DEFAULT_PER_PROFESSION_CAP)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    pairs = _read_corpus(args)
    if args.mode == "gendered":
        animacy = _load_animacy(args.animacy)
        counts = _run_select_gendered(pairs, animacy, cap, seed, out_dir)
    else:
        counts = _run_select_neutral(pairs, args.sample, seed, out_dir)
    _write_manifest(
        out_dir,
        "select",
        {
            "mode": args.mode,
            "src_conllu": str(args.src_conllu),
            "tgt_conllu": str(args.tgt_conllu),
            "lang": args.lang,
            "animacy": str(args.animacy) if args.animacy else None,
            "cap": cap,
            "sample": args.sample,
            "seed": seed,
            "repair_multiroot": args.repair_multiroot,
        },
        counts,
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# subcommand: swap-src


def _swap_sentence(sent):
    pronouns = [t.index for t in sent.tokens if t.surface.lower() in swap.SWAPPABLE]
    if len(pronouns) != 1:
        return sent, False
    return swap.swap_english_gender(sent, pronouns[0]), True


def cmd_swap_src(args) -> int:
    jobs = _resolved(args.jobs, "JOBS", int, 1)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    sentences = conllu.parse_conllu_file(args.infile, lang="en")
    results = _pool_map(_swap_sentence, sentences, jobs)
    swapped_count = 0
    output = []
    for i, (sent, swapped) in enumerate(results, start=1):
        if swapped:
            swapped_count += 1
        else:
            log_event(event="skip", sentence=i, reason="not exactly one gendered pronoun")
        output.append(sent)
    conllu.write_conllu(output, out_dir / "swapped.conllu")
    _write_manifest(
        out_dir,
        "swap-src",
        {"infile": str(args.infile), "jobs": jobs},
        {"sentences": len(sentences), "swapped": swapped_count},
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# subcommand: train-mrf


def cmd_train_mrf(args) -> int:
    smoothing = _resolved(args.smoothing, "SMOOTHING", float, mrf.DEFAULT_SMOOTHING)
    treebank = conllu.parse_conllu_file(args.treebank, lang=args.lang)
    model = mrf.train_agreement_model(treebank, lang=args.lang, smoothing=smoothing)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    mrf.save_model(model, out_path)
    _write_manifest(
        out_path.parent,
        "train-mrf",
        {
            "treebank": str(args.treebank),
            "lang": args.lang,
            "smoothing": smoothing,
            "out": str(args.out),
        },
        {
            "sentences": len(treebank),
            "tags": len(model.tag_space),
            "upos": len(model.unary),
            "deprels": len(model.pairwise),
        },
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# subcommand: cf-gen


def _selections_from_files(args) -> list[selection.GenderedSelection]:
    pairs = _read_corpus(args)
    rows = _read_selections_tsv(args.selections)
    if len(rows) != len(pairs):
        raise InputError(
            f"{args.selections}: {len(rows)} selections but {len(pairs)} sentence pairs"
        )
    out = []
    for pair, (uid, pronoun_index, profession_index, lemma) in zip(pairs, rows):
        repaired = corpus.ParallelPair(
            src=pair.src,
            tgt=pair.tgt,
            src_raw=pair.src_raw,
            tgt_raw=pair.tgt_raw,
            origin=pair.origin,
            uid=uid,
        )
        out.append(
            selection.GenderedSelection(
                pair=repaired,
                pronoun_index=pronoun_index,
                profession_index=profession_index,
                profession_lemma=lemma,
            )
        )
    return out


def _generate_counterfactuals(selections, model, resources_tuple, beta, jobs):
    animacy, inflections, rules, contractions = resources_tuple

    def one(sel):
        return reinflect.generate_counterfactual(
            sel, model, animacy, inflections, rules, contractions, beta=beta
        )

    return _pool_map(one, selections, jobs)


def _write_cf_outputs(selections, results, out_dir: Path):
    kept_pairs = []
    skipped = []
    source_counts = {"Lexicon": 0, "SuffixRule": 0, "Unchanged": 0}
    warnings = []
    for sel, result in zip(selections, results):
        if result.skipped:
            skipped.append((sel.pair.uid, result.skip_reason))
            log_event(event="skip", pair=sel.pair.uid, reason=result.skip_reason)
            continue
        kept_pairs.append(result.pair)
        for source, n in result.report.counts().items():
            source_counts[source] += n
        warnings.extend(result.report.warnings)
    conllu.write_conllu([p.src for p in kept_pairs], out_dir / "cf_src.conllu")
    conllu.write_conllu([p.tgt for p in kept_pairs], out_dir / "cf_tgt.conllu")
    corpus.write_pairs_tsv(kept_pairs, out_dir / "cf_pairs.tsv")
    with open(out_dir / "cf_uids.tsv", "w", encoding="utf-8", newline="\n") as handle:
        for pair in kept_pairs:
            handle.write(pair.uid + "\n")
    with open(out_dir / "skipped.tsv", "w", encoding="utf-8", newline="\n") as handle:
        for uid, reason in skipped:
            handle.write(f"{uid}\t{reason}\n")
    total_marked = sum(source_counts.values()) or 1
    report = {
        "reinflection_sources": source_counts,
        "suffix_rule_fraction": source_counts["SuffixRule"] / total_marked,
        "unchanged_fraction": source_counts["Unchanged"] / total_marked,
        "warnings": warnings,
    }
    with open(out_dir / "report.json", "w", encoding="utf-8", newline="\n") as handle:
        json.dump(report, handle, indent=2, sort_keys=True, ensure_ascii=False)
        handle.write("\n")
    return kept_pairs, skipped


def cmd_cf_gen(args) -> int:
    beta = _resolved(args.beta, "BETA", float, mrf.DEFAULT_ORIGINAL_TAG_BONUS)
    jobs = _resolved(args.jobs, "JOBS", int, 1)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    model = mrf.load_model(args.mrf)
    resources_tuple = _load_lang_resources(args.lang, args)
    selections = _selections_from_files(args)
    results = _generate_counterfactuals(selections, model, resources_tuple, beta, jobs)
    kept, skipped = _write_cf_outputs(selections, results, out_dir)
    _write_manifest(
        out_dir,
        "cf-gen",
        {
            "src_conllu": str(args.src_conllu),
            "tgt_conllu": str(args.tgt_conllu),
            "selections": str(args.selections),
            "mrf": str(args.mrf),
            "lang": args.lang,
            "beta": beta,
            "jobs": jobs,
        },
        {"input": len(selections), "generated": len(kept), "skipped": len(skipped)},
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# subcommand: assemble


def _parse_recipe(path) -> dict:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise InputError(f"{path}: line {line_no}: expected key = value")
            values[key.strip()] = value.strip()
    return values


def _build_gb_component(select_dir: Path, cf_dir: Path, lang: str, strict_lint: bool, out_dir: Path):
    src_sents = conllu.parse_conllu_file(select_dir / "accepted_src.conllu", lang="en")
    tgt_sents = conllu.parse_conllu_file(select_dir / "accepted_tgt.conllu", lang=lang)
    rows = _read_selections_tsv(select_dir / "selections.tsv")
    selections = [
        selection.GenderedSelection(
            pair=corpus.ParallelPair(
                src=s, tgt=t, src_raw=s.raw, tgt_raw=t.raw, origin=corpus.Origin.ORIGINAL, uid=uid
            ),
            pronoun_index=pronoun_index,
            profession_index=profession_index,
            profession_lemma=lemma,
        )
        for (s, t, (uid, pronoun_index, profession_index, lemma)) in zip(src_sents, tgt_sents, rows)
    ]
    cf_src = conllu.parse_conllu_file(cf_dir / "cf_src.conllu", lang="en")
    cf_tgt = conllu.parse_conllu_file(cf_dir / "cf_tgt.conllu", lang=lang)
    with open(cf_dir / "cf_uids.tsv", encoding="utf-8") as handle:
        cf_uids = [line.strip() for line in handle if line.strip()]
    counterfactuals = [
        corpus.ParallelPair(
            src=s, tgt=t, src_raw=s.raw, tgt_raw=t.raw, origin=corpus.Origin.COUNTERFACTUAL, uid=uid
        )
        for s, t, uid in zip(cf_src, cf_tgt, cf_uids)
    ]
    return build_gb_pairs(selections, counterfactuals, strict_lint, out_dir)


def build_gb_pairs(selections, counterfactuals, strict_lint: bool, out_dir: Path):
    """Balance originals with counterfactuals, lint, optionally drop flagged
    pairs, and write gb.tsv plus lint.tsv. Returns (pairs, lint counts)."""
    built = assembly.build_balanced_dataset(selections, counterfactuals)
    flags = list(built.flags)
    for pair in built.pairs:
        if pair.origin is corpus.Origin.COUNTERFACTUAL:
            flags.extend(assembly.lint_counterfactual_pair(pair))
    for flag in flags:
        log_event(event="lint", pair=flag.pair_uid, kind=flag.kind, detail=flag.detail)
    pairs = built.pairs
    if strict_lint:
        hazardous = {f.pair_uid.partition("#")[0] for f in flags if f.kind == "PronounMappingHazard"}
        pairs = [p for p in pairs if p.uid.partition("#")[0] not in hazardous]
    with open(out_dir / "lint.tsv", "w", encoding="utf-8", newline="\n") as handle:
        for flag in flags:
            handle.write(f"{flag.pair_uid}\t{flag.kind}\t{flag.detail}\n")
    corpus.write_pairs_tsv(pairs, out_dir / "gb.tsv")
    lint_counts: dict[str, int] = {}
    for flag in flags:
        lint_counts[flag.kind] = lint_counts.get(flag.kind, 0) + 1
    return pairs, lint_counts


def cmd_assemble(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    recipe_values = _parse_recipe(args.recipe)
    lang = recipe_values.get("lang", "fr")
    seed = _resolved(args.seed, "SEED", int, int(recipe_values.get("seed", "0")))
    strict_lint = args.strict_lint or recipe_values.get("strict_lint", "false") == "true"

    components: list[tuple[str, Path]] = []
    lint_counts: dict[str, int] = {}
    if "gb.path" in recipe_values:
        components.append(("GB", Path(recipe_values["gb.path"])))
    elif "gb.select_dir" in recipe_values:
        _, lint_counts = _build_gb_component(
            Path(recipe_values["gb.select_dir"]),
            Path(recipe_values["gb.cf_dir"]),
            lang,
            strict_lint,
            out_dir,
        )
        components.append(("GB", out_dir / "gb.tsv"))
    if "random.path" in recipe_values:
        components.append(("Random", Path(recipe_values["random.path"])))
    if "sb.path" in recipe_values:
        sb_pairs = assembly.load_handcrafted(recipe_values["sb.path"])
        log_event(event="handcrafted", count=len(sb_pairs))
        components.append(("SB", Path(recipe_values["sb.path"])))
    if not components:
        raise InputError(f"{args.recipe}: no components defined")

    recipe = assembly.DatasetRecipe(components=tuple(components), shuffle_seed=seed)
    manifest = assembly.mix_corpora(recipe, out_dir, lint_counts=lint_counts)
    _write_manifest(
        out_dir / "meta",
        "assemble",
        {
            "recipe": str(args.recipe),
            "resolved": recipe_values,
            "seed": seed,
            "strict_lint": strict_lint,
        },
        {"total": manifest["total"], "lint": lint_counts},
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# subcommand: evaluate


def cmd_evaluate(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    animacy = _load_animacy(args.animacy)
    items = evaluate.load_challenge_set(args.challenge)
    with open(args.translations, encoding="utf-8") as handle:
        translations = [line.rstrip("\n") for line in handle]
    while translations and translations[-1] == "":
        translations.pop()
    if len(items) != len(translations):
        raise InputError(
            f"{len(items)} challenge items but {len(translations)} translation lines"
        )
    predictions = [
        evaluate.extract_predicted_gender(item, text, animacy, args.lang)
        for item, text in zip(items, translations)
    ]
    report = evaluate.compute_metrics(items, predictions)
    with open(out_dir / "metrics.json", "w", encoding="utf-8", newline="\n") as handle:
        handle.write(report.to_json() + "\n")
    with open(out_dir / "audit.tsv", "w", encoding="utf-8", newline="\n") as handle:
        for i, (item, pred) in enumerate(zip(items, predictions), start=1):
            handle.write(
                f"{i}\t{item.gold_gender}\t{pred.predicted}\t{pred.matched_target_form or '-'}\t{item.stereotype}\n"
            )
    _write_manifest(
        out_dir,
        "evaluate",
        {
            "challenge": str(args.challenge),
            "translations": str(args.translations),
            "lang": args.lang,
            "animacy": str(args.animacy) if args.animacy else None,
        },
        {"items": len(items), **{k: v for k, v in report.display().items()}},
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# subcommand: pipeline


def cmd_pipeline(args) -> int:
    seed = _resolved(args.seed, "SEED", int, 0)
    jobs = _resolved(args.jobs, "JOBS", int, 1)
    cap = _resolved(args.cap, "CAP", int, selection.DEFAULT_PER_PROFESSION_CAP)
    beta = _resolved(args.beta, "BETA", float, mrf.DEFAULT_ORIGINAL_TAG_BONUS)
    out_dir = Path(args.out)
    select_dir = out_dir / "select"
    swap_dir = out_dir / "swap"
    cf_dir = out_dir / "cfgen"
    assemble_dir = out_dir / "assemble"
    for directory in (select_dir, swap_dir, cf_dir, assemble_dir):
        directory.mkdir(parents=True, exist_ok=True)

    pairs = _read_corpus(args)
    animacy = _load_animacy(args.animacy)
    resources_tuple = _load_lang_resources(args.lang, args)
    model = mrf.load_model(args.mrf)

    select_counts = _run_select_gendered(pairs, animacy, cap, seed, select_dir)
    sampled = _selections_from_files(
        argparse.Namespace(
            src_conllu=select_dir / "accepted_src.conllu",
            tgt_conllu=select_dir / "accepted_tgt.conllu",
            selections=select_dir / "selections.tsv",
            lang=args.lang,
            repair_multiroot=args.repair_multiroot,
        )
    )

    swapped = _pool_map(
        lambda sel: swap.swap_english_gender(sel.pair.src, sel.pronoun_index), sampled, jobs
    )
    conllu.write_conllu(swapped, swap_dir / "swapped.conllu")

    results = _generate_counterfactuals(sampled, model, resources_tuple, beta, jobs)
    kept, skipped = _write_cf_outputs(sampled, results, cf_dir)

    neutral_counts = _run_select_neutral(pairs, args.sample, seed, select_dir / "neutral")

    _, lint_counts = build_gb_pairs(sampled, kept, args.strict_lint, assemble_dir)
    components: list[tuple[str, Path]] = [("GB", assemble_dir / "gb.tsv")]
    if args.sample > 0:
        components.append(("Random", select_dir / "neutral" / "random.tsv"))
    if args.handcrafted:
        assembly.load_handcrafted(args.handcrafted)
        components.append(("SB", Path(args.handcrafted)))
    recipe = assembly.DatasetRecipe(components=tuple(components), shuffle_seed=seed)
    mix_manifest = assembly.mix_corpora(recipe, assemble_dir, lint_counts=lint_counts)

    _write_manifest(
        out_dir,
        "pipeline",
        {
            "src_conllu": str(args.src_conllu),
            "tgt_conllu": str(args.tgt_conllu),
            "lang": args.lang,
            "mrf": str(args.mrf),
            "animacy": str(args.animacy) if args.animacy else None,
            "handcrafted": str(args.handcrafted) if args.handcrafted else None,
            "seed": seed,
            "jobs": jobs,
            "cap": cap,
            "beta": beta,
            "sample": args.sample,
            "strict_lint": args.strict_lint,
            "repair_multiroot": args.repair_multiroot,
        },
        {
            "select": select_counts,
            "neutral": neutral_counts,
            "counterfactuals": len(kept),
            "cf_skipped": len(skipped),
            "mixed_total": mix_manifest["total"],
            "lint": lint_counts,
        },
    )
    return EXIT_OK


# --------------------------------------------------------------------------


def _add_corpus_arguments(parser) -> None:
    parser.add_argument("--src-conllu", required=True, help="English side, CoNLL-U")
    parser.add_argument("--tgt-conllu", required=True, help="target side, CoNLL-U")
    parser.add_argument("--lang", required=True, choices=("fr", "es", "it"))
    parser.add_argument(
        "--no-repair-multiroot",
        dest="repair_multiroot",
        action="store_false",
        help="fail on multi-root sentences instead of repairing them",
    )
    parser.set_defaults(repair_multiroot=True)


def _add_resource_arguments(parser) -> None:
    parser.add_argument("--animacy", help="animacy lexicon TSV (default: packaged)")
    parser.add_argument("--inflections", help="inflection lexicon TSV (default: packaged)")
    parser.add_argument("--suffix-rules", dest="suffix_rules", help="suffix rule TSV")
    parser.add_argument("--contractions", help="contraction table TSV")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="cfgen",
        description="Gender-counterfactual fine-tuning corpora and gender-accuracy evaluation.",
        epilog="Defaults may also be set via CFGEN_SEED, CFGEN_JOBS, CFGEN_CAP, "
        "CFGEN_BETA, CFGEN_SMOOTHING (flags win).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="filter a parallel corpus and sample candidates")
    _add_corpus_arguments(p)
    p.add_argument("--mode", required=True, choices=("gendered", "neutral"))
    p.add_argument("--animacy", help="animacy lexicon TSV (default: packaged)")
    p.add_argument("--cap", type=int, help="per-profession cap (gendered mode)")
    p.add_argument("--sample", type=int, default=0, help="random sample size (neutral mode)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("swap-src", help="swap the gendered pronoun in English CoNLL-U")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_swap_src)

    p = sub.add_parser("train-mrf", help="train an agreement model from a treebank")
    p.add_argument("--treebank", required=True)
    p.add_argument("--lang", required=True)
    p.add_argument("--smoothing", type=float)
    p.add_argument("--out", required=True, help="output model file")
    p.set_defaults(func=cmd_train_mrf)

    p = sub.add_parser("cf-gen", help="generate counterfactual pairs for selected sentences")
    _add_corpus_arguments(p)
    _add_resource_arguments(p)
    p.add_argument("--selections", required=True, help="selections.tsv from select")
    p.add_argument("--mrf", required=True, help="trained agreement model")
    p.add_argument("--beta", type=float, help="original-tag bonus")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cf_gen)

    p = sub.add_parser("assemble", help="build and mix the fine-tuning corpus")
    p.add_argument("--recipe", required=True, help="key = value recipe file")
    p.add_argument("--seed", type=int)
    p.add_argument("--strict-lint", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("evaluate", help="score translations for gender accuracy")
    p.add_argument("--challenge", required=True)
    p.add_argument("--translations", required=True)
    p.add_argument("--lang", required=True, choices=("fr", "es", "it"))
    p.add_argument("--animacy")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pipeline", help="select, swap, generate, and assemble in one run")
    _add_corpus_arguments(p)
    _add_resource_arguments(p)
    p.add_argument("--mrf", required=True)
    p.add_argument("--handcrafted")
    p.add_argument("--cap", type=int)
    p.add_argument("--sample", type=int, default=0)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--strict-lint", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as err:
        log_event(event="error", kind="input", message=str(err))
        return EXIT_INPUT
    except (OSError, ValueError) as err:
        log_event(event="error", kind="input", message=str(err))
        return EXIT_INPUT
    except Exception as err:  # pragma: no cover - internal failure path
        traceback.print_exc()
        log_event(event="error", kind="internal", message=str(err))
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
