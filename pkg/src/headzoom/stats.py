"""Mode-comparison pipeline over per-trial metric tables.

Three stages per metric: a one-factor repeated-measures ANOVA (subject
variance partitioned out of the error term, significant at p <= 0.05),
Bonferroni-corrected paired t-tests for every mode pair when the ANOVA
is significant (threshold 0.05 divided by the number of pairs), and
paired Cohen's d with the usual negligible/small/medium/large bands at
0.2 / 0.5 / 0.8. Sums of squares, t statistics and effect sizes are
computed here; only the t/F distribution tails come from scipy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import stats as sps

ALPHA = 0.05
BONFERRONI_COMPARISONS = 3
ALPHA_CORRECTED = ALPHA / BONFERRONI_COMPARISONS

_ID_COLUMNS = {"participant", "mode", "image_id"}


class StatsError(ValueError):
    pass


class InsufficientDataError(StatsError):
    pass


class PerfectSeparationError(StatsError):
    """Paired differences have zero variance but a nonzero mean."""


class ZeroVarianceError(StatsError):
    pass


@dataclass(frozen=True)
class MetricRow:
    participant: str
    mode: str
    metric: str
    value: float


@dataclass
class MetricTable:
    rows: list[MetricRow] = field(default_factory=list)

    def add(self, participant: str, mode: str, metric: str, value: float) -> None:
        self.rows.append(MetricRow(participant, mode, metric, float(value)))

    def metrics(self) -> list[str]:
        return sorted({r.metric for r in self.rows})

    def modes(self) -> list[str]:
        return sorted({r.mode for r in self.rows})

    def pivot(self, metric: str) -> dict[str, dict[str, float]]:
        """participant -> mode -> value; duplicate cells are averaged."""
        cells: dict[str, dict[str, list[float]]] = {}
        for r in self.rows:
            if r.metric == metric:
                cells.setdefault(r.participant, {}).setdefault(r.mode, []).append(r.value)
        return {
            p: {m: sum(vs) / len(vs) for m, vs in modes.items()}
            for p, modes in cells.items()
        }

    def complete_matrix(self, metric: str, modes: Sequence[str]) -> tuple[list[str], np.ndarray]:
        """Listwise-complete (participants x modes) value matrix."""
        pivot = self.pivot(metric)
        participants = sorted(p for p, mv in pivot.items() if all(m in mv for m in modes))
        values = np.array([[pivot[p][m] for m in modes] for p in participants])
        return participants, values

    @staticmethod
    def from_wide_tsv(text: str) -> "MetricTable":
        """Ingest the metrics module's results table: id columns stay ids,
        every other column becomes one metric; blank cells are skipped."""
        lines = [l for l in text.splitlines() if l.strip() and not l.startswith("#")]
        if not lines:
            return MetricTable()
        header = lines[0].split("\t")
        if "participant" not in header or "mode" not in header:
            raise StatsError("metric table needs participant and mode columns")
        table = MetricTable()
        for line in lines[1:]:
            parts = line.split("\t")
            if len(parts) != len(header):
                raise StatsError(f"ragged metric table row: {line!r}")
            row = dict(zip(header, parts))
            for col, raw in row.items():
                if col in _ID_COLUMNS or raw == "":
                    continue
                try:
                    value = float(raw)
                except ValueError:
                    raise StatsError(f"non-numeric value {raw!r} in column {col!r}")
                table.add(row["participant"], row["mode"], col, value)
        return table


@dataclass(frozen=True)
class AnovaResult:
    metric: str
    f_statistic: float
    df_between: int
    df_within: int
    p_value: float
    eta_squared: float
    n_subjects: int

    @property
    def significant(self) -> bool:
        return self.p_value <= ALPHA


@dataclass(frozen=True)
class PairwiseResult:
    metric: str
    mode_a: str
    mode_b: str
    t_statistic: float
    df: int
    p_value: float
    cohens_d: float
    band: str
    alpha_corrected: float

    @property
    def significant_after_correction(self) -> bool:
        return self.p_value <= self.alpha_corrected


def effect_band(d: float) -> str:
    """Magnitude band for |d|: the 0.5 and 0.8 cut points are inclusive
    on their lower side."""
    a = abs(d)
    if a < 0.2:
        return "negligible"
    if a < 0.5:
        return "small"
    if a < 0.8:
        return "medium"
    return "large"


def cohens_d(a: Sequence[float], b: Sequence[float]) -> tuple[float, str]:
    """Paired effect size: mean(a-b) / sd(a-b), sample sd."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) != len(b) or len(a) < 2:
        raise InsufficientDataError("paired effect size needs n >= 2 pairs")
    diffs = a - b
    mean = float(diffs.mean())
    sd = float(diffs.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return 0.0, effect_band(0.0)
        raise ZeroVarianceError("paired differences have zero variance")
    d = mean / sd
    return d, effect_band(d)


def rm_anova(table: MetricTable, metric: str) -> AnovaResult:
    """Within-subject one-factor ANOVA for one metric across all modes.

    Participants missing any mode are dropped (listwise deletion).
    """
    modes = table.modes()
    if len(modes) < 2:
        raise InsufficientDataError("need at least two modes")
    participants, values = table.complete_matrix(metric, modes)
    n, k = values.shape if values.size else (0, len(modes))
    if n < 2:
        raise InsufficientDataError(
            f"metric {metric!r} has {n} complete participants; need at least 2"
        )

    grand = values.mean()
    cond_means = values.mean(axis=0)
    subj_means = values.mean(axis=1)
    ss_cond = n * float(((cond_means - grand) ** 2).sum())
    ss_subj = k * float(((subj_means - grand) ** 2).sum())
    ss_total = float(((values - grand) ** 2).sum())
    ss_error = max(ss_total - ss_cond - ss_subj, 0.0)

    df_between = k - 1
    df_within = (k - 1) * (n - 1)
    ms_cond = ss_cond / df_between
    ms_error = ss_error / df_within

    if ms_error == 0.0:
        f = 0.0 if ms_cond == 0.0 else math.inf
        p = 1.0 if ms_cond == 0.0 else 0.0
    else:
        f = ms_cond / ms_error
        p = float(sps.f.sf(f, df_between, df_within))
    denom = ss_cond + ss_error
    eta = ss_cond / denom if denom > 0.0 else 0.0
    return AnovaResult(metric, f, df_between, df_within, p, eta, n)


def pairwise_t(
    table: MetricTable,
    metric: str,
    mode_a: str,
    mode_b: str,
    alpha_corrected: float = ALPHA_CORRECTED,
) -> PairwiseResult:
    """Two-sided paired t-test between two modes for one metric."""
    participants, values = table.complete_matrix(metric, [mode_a, mode_b])
    n = len(participants)
    if n < 2:
        raise InsufficientDataError(
            f"metric {metric!r} has {n} paired participants; need at least 2"
        )
    a, b = values[:, 0], values[:, 1]
    diffs = a - b
    mean = float(diffs.mean())
    sd = float(diffs.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return PairwiseResult(
                metric, mode_a, mode_b, 0.0, n - 1, 1.0, 0.0, effect_band(0.0), alpha_corrected
            )
        raise PerfectSeparationError(
            f"{metric!r}: all paired differences equal {mean!r}; t is undefined"
        )
    t = mean / (sd / math.sqrt(n))
    p = 2.0 * float(sps.t.sf(abs(t), n - 1))
    d, band = cohens_d(a, b)
    return PairwiseResult(metric, mode_a, mode_b, t, n - 1, min(p, 1.0), d, band, alpha_corrected)


# --- report ------------------------------------------------------------------


@dataclass(frozen=True)
class MetricAnalysis:
    anova: AnovaResult
    pairwise: tuple[PairwiseResult, ...]


@dataclass(frozen=True)
class AnalysisReport:
    analyses: tuple[MetricAnalysis, ...]

    @property
    def empty(self) -> bool:
        return not self.analyses


def significance_bucket(p: float) -> str:
    if p <= 0.01:
        return "high"
    if p <= ALPHA:
        return "moderate"
    return "ns"


def analyze(table: MetricTable) -> AnalysisReport:
    """ANOVA per metric; significant metrics get all pairwise tests with a
    Bonferroni threshold of 0.05 over the number of pairs."""
    modes = table.modes()
    analyses = []
    pairs = list(combinations(modes, 2))
    alpha_corr = ALPHA / len(pairs) if pairs else ALPHA
    for metric in table.metrics():
        try:
            anova = rm_anova(table, metric)
        except InsufficientDataError:
            continue
        pairwise: list[PairwiseResult] = []
        if anova.significant:
            for a, b in pairs:
                try:
                    pairwise.append(pairwise_t(table, metric, a, b, alpha_corr))
                except (InsufficientDataError, PerfectSeparationError):
                    continue
        analyses.append(MetricAnalysis(anova, tuple(pairwise)))
    return AnalysisReport(tuple(analyses))


def report_tsv(report: AnalysisReport) -> str:
    lines = [
        "\t".join(
            (
                "metric",
                "test",
                "mode_a",
                "mode_b",
                "statistic",
                "df1",
                "df2",
                "p_value",
                "effect_size",
                "band",
                "bucket",
                "significant",
            )
        )
    ]
    for ma in report.analyses:
        a = ma.anova
        lines.append(
            "\t".join(
                (
                    a.metric,
                    "rm_anova",
                    "",
                    "",
                    repr(float(a.f_statistic)),
                    str(a.df_between),
                    str(a.df_within),
                    repr(float(a.p_value)),
                    repr(float(a.eta_squared)),
                    "",
                    significance_bucket(a.p_value),
                    "1" if a.significant else "0",
                )
            )
        )
        for pw in ma.pairwise:
            lines.append(
                "\t".join(
                    (
                        pw.metric,
                        "paired_t",
                        pw.mode_a,
                        pw.mode_b,
                        repr(float(pw.t_statistic)),
                        str(pw.df),
                        "",
                        repr(float(pw.p_value)),
                        repr(float(pw.cohens_d)),
                        pw.band,
                        significance_bucket(pw.p_value),
                        "1" if pw.significant_after_correction else "0",
                    )
                )
            )
    return "\n".join(lines) + "\n"


def report_text(report: AnalysisReport) -> str:
    if report.empty:
        return "no analyzable metrics\n"
    out = []
    for ma in report.analyses:
        a = ma.anova
        out.append(
            f"{a.metric}: F({a.df_between},{a.df_within}) = {a.f_statistic:.3f}, "
            f"p = {a.p_value:.4g}, eta2 = {a.eta_squared:.3f} "
            f"[{significance_bucket(a.p_value)}] (n={a.n_subjects})"
        )
        for pw in ma.pairwise:
            mark = "significant" if pw.significant_after_correction else "ns"
            out.append(
                f"  {pw.mode_a} vs {pw.mode_b}: t({pw.df}) = {pw.t_statistic:.3f}, "
                f"p = {pw.p_value:.4g} (alpha' = {pw.alpha_corrected:.4g}, {mark}), "
                f"d = {pw.cohens_d:.3f} ({pw.band})"
            )
    return "\n".join(out) + "\n"


def write_report(report: AnalysisReport, tsv_path: str | Path, text_path: Optional[str | Path] = None) -> None:
    Path(tsv_path).write_text(report_tsv(report))
    if text_path is not None:
        Path(text_path).write_text(report_text(report))
