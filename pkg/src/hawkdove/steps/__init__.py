# -*- coding: utf-8 -*-

"""
Built-in pipeline steps, one per command line subcommand.

Artifact layout below the output directory:
    filtered/<kind>.csv  filter_report.json  filter_report.csv  corpus_stats.csv  title_filter_report.json
    sample/<kind>.csv
    split/<kind>.csv  split_report.json  split_sentences.csv
    classified/<kind>.csv  label_distribution.json
    eval/<dataset>.json  eval_table.csv  [eval_temporal_table.csv]
    measure/<kind>.csv
    correlation.json  correlation_table.csv
    regression.json  regression_table.csv
    backtest_ledger.csv  backtest_values.csv  backtest_summary.json
    figures/*.csv  figures/index.json
"""

from typing import Optional

import pandas as pd

from hawkdove.backtest import buy_and_hold, compare, load_price_csv, run_strategy, ShortConvention, value_paths
from hawkdove.core.artifacts import ArtifactStore, MissingArtifactError, read_csv_frame
from hawkdove.core.config import ConfigError
from hawkdove.core.step import RunContext, Step, StepCategories, StepGroup
from hawkdove.corpus import (concat_corpora, Corpus, CorpusError, corpus_frame, corpus_stats, CorpusStats,
                             DocumentKind, ingest_raw_directory, ingest_sentence_csv, sample_for_annotation)
from hawkdove.econometrics import (AlignMode, chair_rows, correlate, correlation_table, EconDataError,
                                   EconometricsError, load_econ_csv, load_treasury_csv, regress_yields,
                                   regression_table, yoy_percent_change)
from hawkdove.evaluation import EvaluationInputError, seed_suite, SplitMode, SplitSpec, table_row
from hawkdove.lexicon_filter import filter_corpus, filter_speech_titles, FilterReport
from hawkdove.measure import load_series, MeasurePoint, measure_series, series_frame
from hawkdove.splitter import split_corpus, split_frame, SplitReport
from hawkdove.stance_rules import classify_corpus, LabelDistribution, make_label_source, RuleOptions, TieRule

KIND_TITLES = {
    DocumentKind.MeetingMinutes: "Meeting Minutes",
    DocumentKind.PressConference: "Press Conferences",
    DocumentKind.Speech: "Speeches",
}

ANNOTATION_SAMPLE_PER_FILE = 5


def load_kind_corpora(store: ArtifactStore, directory: str, producer: str) -> dict[DocumentKind, Corpus]:
    """Reads <directory>/<kind>.csv for every kind present; at least one must exist."""
    corpora = {}
    for kind in DocumentKind:
        relpath = f"{directory}/{kind.slug}.csv"
        if store.exists(relpath):
            corpora[kind] = ingest_sentence_csv(store.path(relpath), kind)
    if not corpora:
        raise MissingArtifactError(store.path(f"{directory}/<kind>.csv"), producer)
    return corpora


def load_measure_series(store: ArtifactStore) -> dict[DocumentKind, list[MeasurePoint]]:
    series = {}
    for kind in DocumentKind:
        relpath = f"measure/{kind.slug}.csv"
        if store.exists(relpath):
            series[kind] = load_series(store.path(relpath))
    if not series:
        raise MissingArtifactError(store.path("measure/<kind>.csv"), MeasureStep.NAME)
    return series


def period_label(kind: DocumentKind, series: list[MeasurePoint]) -> str:
    if not series:
        return KIND_TITLES[kind]
    return f"{KIND_TITLES[kind]} ({series[0].release_date.year}-{series[-1].release_date.year})"


def classified_input(context: RunContext) -> tuple[str, str]:
    if context.config.use_split:
        return "split", SplitStep.NAME
    return "filtered", FilterStep.NAME


class FilterStep(Step):
    NAME = "filter"
    DESCRIPTION = "Keep target sentences (panel A1/B1 phrases); title filter for speeches"
    CATEGORY = StepCategories.Corpus

    def _inputs(self, context: RunContext) -> dict[DocumentKind, Corpus]:
        config = context.config
        corpora: dict[DocumentKind, Corpus] = {}
        for key, path in config.corpora.items():
            kind = DocumentKind.parse(key)
            corpora[kind] = ingest_sentence_csv(path, kind)

        if config.raw_text_dir is not None:
            raw = ingest_raw_directory(config.raw_text_dir)
            for kind in raw.kinds:
                try:
                    corpora[kind] = concat_corpora([corpora.get(kind, Corpus()), raw.of_kind(kind)])
                except CorpusError as e:
                    raise ConfigError("Raw text and sentence CSV share documents: %s" % e) from None

        if not corpora:
            raise ConfigError("Command 'filter' needs config 'corpora' or 'raw_text_dir'")
        return corpora

    def run(self, context: RunContext):
        store = context.store
        stats_rows = []
        reports = {}
        total: Optional[FilterReport] = None

        for kind, corpus in sorted(self._inputs(context).items()):
            pre = corpus_stats(corpus)

            if kind is DocumentKind.Speech and context.config.title_filter:
                if any(d.title for d in corpus):
                    corpus, title_report = filter_speech_titles(corpus, context.lexicon)
                    store.write("title_filter_report.json", title_report.as_dict())
                    store.write("title_filter_report.csv", title_report.frame())
                else:
                    self.warning("Speeches carry no titles, title filter skipped")

            filtered, report = filter_corpus(corpus, context.lexicon)
            post = corpus_stats(Corpus(d for d in filtered if d.sentences))
            store.write(f"filtered/{kind.slug}.csv", corpus_frame(filtered))

            reports[kind.code] = report.as_dict()
            total = report if total is None else total + report
            stats_rows.append(_stats_row("pre-filter", kind.code, pre))
            stats_rows.append(_stats_row("post-filter", kind.code, post))
            self.info("%s: kept %d of %d sentences", kind.name, report.kept, report.kept + report.dropped)

        store.write("filter_report.json", {
            "kinds": reports,
            "total": {"kept": total.kept, "dropped": total.dropped, "files": len(total.kept_per_file)},
        })
        store.write("filter_report.csv", total.frame())
        store.write("filter_evidence.csv", total.evidence_frame())
        store.write("corpus_stats.csv", pd.DataFrame(stats_rows))


def _stats_row(stage: str, kind: str, stats: CorpusStats) -> dict:
    return {"stage": stage, "kind": kind, **stats.as_dict()}


class SampleStep(Step):
    NAME = "sample"
    DESCRIPTION = "Draw up to five target sentences per file for annotation"
    CATEGORY = StepCategories.Corpus

    def run(self, context: RunContext):
        seed = context.config.seeds[0]
        for kind, corpus in load_kind_corpora(context.store, "filtered", FilterStep.NAME).items():
            sample = sample_for_annotation(corpus, ANNOTATION_SAMPLE_PER_FILE, seed)
            context.store.write(f"sample/{kind.slug}.csv", corpus_frame(sample))
            self.info("%s: sampled %d sentences from %d files", kind.name, sample.sentence_count, len(sample))


class SplitStep(Step):
    NAME = "split"
    DESCRIPTION = "Split sentences at contrast keywords"
    CATEGORY = StepCategories.Corpus

    def run(self, context: RunContext):
        store = context.store
        reports = {}
        total = SplitReport(0, 0, 0)
        split_rows = []
        for kind, corpus in load_kind_corpora(store, "filtered", FilterStep.NAME).items():
            frame = split_frame(corpus, context.lexicon)
            result, report = split_corpus(corpus, context.lexicon)
            store.write(f"split/{kind.slug}.csv", corpus_frame(result))
            reports[kind.code] = report.as_dict()
            total += report
            split_rows.append(frame.assign(kind=kind.code))
            self.info("%s: %d -> %d sentences", kind.name, report.before_count, report.after_count)

        store.write("split_report.json", {"kinds": reports, "total": total.as_dict()})
        store.write("split_sentences.csv", pd.concat(split_rows, ignore_index=True))


def make_source(context: RunContext):
    config = context.config
    spec = f"file:{config.labels}" if config.labels else "rule"
    return make_label_source(spec, context.lexicon, RuleOptions(TieRule(config.tie_rule), config.apply_negation))


class ClassifyStep(Step):
    NAME = "classify"
    DESCRIPTION = "Label every sentence Dovish, Hawkish or Neutral"
    CATEGORY = StepCategories.Classification

    def run(self, context: RunContext):
        directory, producer = classified_input(context)
        source = make_source(context)
        counts = {}
        for kind, corpus in load_kind_corpora(context.store, directory, producer).items():
            labeled, distribution = classify_corpus(corpus, source)
            counts.update(distribution.counts)
            context.store.write(f"classified/{kind.slug}.csv", corpus_frame(labeled))

        distribution = LabelDistribution(source.name, counts)
        context.store.write("label_distribution.json", distribution.as_dict())
        self.info("Labeled with %s: %s", source.name, distribution.as_dict()["total"])


class EvalStep(Step):
    NAME = "eval"
    DESCRIPTION = "Weighted F1 of the label source over seeded 80:20 splits"
    CATEGORY = StepCategories.Evaluation

    def _suite(self, context: RunContext, datasets: dict[str, Corpus], source, template: SplitSpec,
               prefix: str) -> dict:
        results = {}
        for name, corpus in datasets.items():
            results[name] = seed_suite(corpus, source, context.config.seeds, template, context.config.stddev_ddof)
            context.store.write(f"eval/{prefix}{name.lower()}.json", results[name].as_dict())
            self.info("%s%s: mean weighted F1 %.4f (std %.4f)", prefix, name, results[name].mean_f1,
                      results[name].stddev_f1)
        return results

    def run(self, context: RunContext):
        config = context.config
        directory, producer = classified_input(context)
        corpora = load_kind_corpora(context.store, directory, producer)
        suffix = "-S" if config.use_split else ""

        datasets = {f"{kind.code}{suffix}": corpus for kind, corpus in corpora.items()}
        try:
            datasets[f"Combined{suffix}"] = concat_corpora(corpora.values())
        except CorpusError as e:
            raise EvaluationInputError("Combined dataset needs document ids unique across kinds: %s" % e) from None

        source = make_source(context)
        model = "Rule-Based" if source.KEY == "rule" else source.name

        results = self._suite(context, datasets, source, SplitSpec(), "")
        context.store.write("eval_table.csv", table_row(model, results))

        if config.temporal_boundary is not None:
            template = SplitSpec(SplitMode.TEMPORAL, temporal_boundary=config.temporal_boundary)
            temporal = self._suite(context, datasets, source, template, "temporal_")
            context.store.write("eval_temporal_table.csv", table_row(model, temporal))


class MeasureStep(Step):
    NAME = "measure"
    DESCRIPTION = "Document-level hawkishness series per document kind"
    CATEGORY = StepCategories.Measure

    def run(self, context: RunContext):
        for kind, corpus in load_kind_corpora(context.store, "classified", ClassifyStep.NAME).items():
            series = measure_series(corpus, kind)
            context.store.write(f"measure/{kind.slug}.csv", series_frame(series))
            self.info("%s: %d measure points", kind.name, len(series))


def load_inflation(context: RunContext, command: str) -> dict:
    config = context.config
    return {
        "CPI": yoy_percent_change(load_econ_csv(config.require("cpi", command), "CPI")),
        "PPI": yoy_percent_change(load_econ_csv(config.require("ppi", command), "PPI")),
    }


class CorrelateStep(Step):
    NAME = "correlate"
    DESCRIPTION = "Correlation of the measure with the next CPI/PPI year-over-year change"
    CATEGORY = StepCategories.Validation
    REQUIRES = ("cpi", "ppi")

    def run(self, context: RunContext):
        mode = AlignMode(context.config.align_mode)
        econ = load_inflation(context, self.NAME)

        rows = []
        for kind, series in load_measure_series(context.store).items():
            try:
                rows.append(correlate(series, econ, mode, period_label(kind, series)))
            except EconDataError:
                raise
            except EconometricsError as e:
                self.warning("Skipping %s: %s", kind.name, e)
                continue
            if kind is DocumentKind.MeetingMinutes:
                rows.extend(chair_rows(series, econ, mode))

        if not rows:
            raise EconDataError("No measure series long enough to correlate")

        context.store.write("correlation.json", {
            "align_mode": mode.value,
            "rows": [{"sample": r.sample, "avg_delay_days": r.avg_delay_days,
                      "results": {name: res.as_dict() for name, res in r.results.items()}} for r in rows],
        })
        context.store.write("correlation_table.csv", correlation_table(rows))


class RegressStep(Step):
    NAME = "regress"
    DESCRIPTION = "Regression of treasury yields on the measure"
    CATEGORY = StepCategories.Validation
    REQUIRES = ("treasury",)

    def run(self, context: RunContext):
        config = context.config
        treasury = load_treasury_csv(config.treasury)

        panels = {}
        for kind, series in load_measure_series(context.store).items():
            try:
                panels[period_label(kind, series)] = regress_yields(series, treasury, config.maturities,
                                                                    config.max_yield_lag_days)
            except EconDataError:
                raise
            except EconometricsError as e:
                self.warning("Skipping %s: %s", kind.name, e)

        if not panels:
            raise EconDataError("No measure series long enough to regress")

        context.store.write("regression.json", {
            "maturities": list(config.maturities),
            "max_yield_lag_days": config.max_yield_lag_days,
            "panels": {panel: {m: r.as_dict() for m, r in by_maturity.items()}
                       for panel, by_maturity in panels.items()},
        })
        context.store.write("regression_table.csv", regression_table(panels))


class BacktestStep(Step):
    NAME = "backtest"
    DESCRIPTION = "Long/short strategy on the press conference measure against buy-and-hold"
    CATEGORY = StepCategories.Market
    REQUIRES = ("prices",)

    def run(self, context: RunContext):
        config = context.config
        store = context.store
        prices = load_price_csv(config.prices)
        signals = load_series(store.require(f"measure/{DocumentKind.PressConference.slug}.csv", MeasureStep.NAME))
        if config.backtest_start is not None:
            signals = [p for p in signals if p.release_date >= config.backtest_start]

        strategy = run_strategy(signals, prices, config.backtest_end, ShortConvention(config.short_convention))
        benchmark = buy_and_hold(prices, strategy.start, strategy.end)

        summary = {
            "symbol": prices.symbol,
            "strategy": strategy.as_dict(),
            "buy_and_hold": benchmark.as_dict(),
            "excess_return_pct": None,
        }
        if strategy.terminated:
            self.error("Strategy terminated on %s: %s", strategy.end, strategy.terminated)
        else:
            summary["excess_return_pct"] = compare(strategy, benchmark)
            self.info("Strategy %.2f%% vs buy-and-hold %.2f%%", strategy.final_return_pct,
                      benchmark.final_return_pct)

        store.write("backtest_ledger.csv", strategy.frame())
        store.write("backtest_values.csv", value_paths(strategy, benchmark))
        store.write("backtest_summary.json", summary)


class ReportStep(Step):
    NAME = "report"
    DESCRIPTION = "Bundle plot-ready CSVs for the figures"
    CATEGORY = StepCategories.Report

    def run(self, context: RunContext):
        store = context.store
        series = load_measure_series(store)
        figures = {}

        frames = [series_frame(points) for points in series.values()]
        figures["measure_series.csv"] = pd.concat(frames, ignore_index=True)

        minutes = series.get(DocumentKind.MeetingMinutes)
        if minutes and context.config.cpi and context.config.ppi:
            figures["measure_inflation.csv"] = self._inflation_overlay(context, minutes)
        else:
            self.info("No minutes series or CPI/PPI data, inflation overlay skipped")

        if store.exists("backtest_values.csv"):
            figures["portfolio_value.csv"] = read_csv_frame(store.path("backtest_values.csv"))
        else:
            self.info("No backtest values, portfolio figure skipped")

        if store.exists("eval_table.csv"):
            figures["eval_table.csv"] = read_csv_frame(store.path("eval_table.csv"))

        for name, frame in figures.items():
            store.write(f"figures/{name}", frame)
        store.write("figures/index.json", {"figures": sorted(figures)})

    def _inflation_overlay(self, context: RunContext, minutes: list[MeasurePoint]) -> pd.DataFrame:
        """Long format (date, series, value) over the span of the minutes series."""
        econ = load_inflation(context, self.NAME)
        start = pd.Timestamp(minutes[0].release_date) - pd.DateOffset(months=1)
        end = pd.Timestamp(minutes[-1].release_date) + pd.DateOffset(months=1)

        rows = [{"date": p.release_date.isoformat(), "series": "measure", "value": p.value} for p in minutes]
        for name, e in econ.items():
            window = e.values.loc[start:end]
            rows.extend({"date": ts.date().isoformat(), "series": f"{name}_yoy", "value": float(v)}
                        for ts, v in window.items())
        return pd.DataFrame(rows, columns=["date", "series", "value"])


class BuiltinSteps(StepGroup):
    NAME = "Built-in steps"
    STEPS = (FilterStep, SampleStep, SplitStep, ClassifyStep, EvalStep, MeasureStep, CorrelateStep, RegressStep,
             BacktestStep, ReportStep)
