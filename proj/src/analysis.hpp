#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scoring.hpp"
#include "stats.hpp"

namespace scorelens::analysis {

using stats::BootstrapSummary;
using stats::bootstrap_summary;
using stats::qwk;
using stats::rmse;
using stats::weighted_f1;

struct PairedScoreSet {
  std::string scorer_id;
  std::string kind;                                       // intervention kind name
  std::vector<std::pair<std::string, double>> deltas;     // (essay id, S_CF - S_OR)
  std::vector<std::string> unpaired;                      // gap report
  std::vector<double> delta_values() const;
};

// Inner join of original and counterfactual records by essay id. Records must
// share the scorer id and scale; level-scale deltas use band midpoints.
PairedScoreSet pair_scores(const std::vector<scoring::ScoreRecord>& originals,
                           const std::vector<scoring::ScoreRecord>& counterfactuals);

struct AgreementReport {
  double qwk = 0.0;
  std::optional<double> weighted_f1;  // level-scale datasets
  std::optional<double> rmse;         // numeric-scale datasets
  std::size_t n = 0;
};

// Agreement of a scorer's original-variant records against gold labels.
// Numeric datasets use the nine grid values as QWK categories and report
// RMSE; level datasets use the three bands and report weighted F1.
AgreementReport agreement_report(const corpus::Corpus& corpus,
                                 const std::vector<scoring::ScoreRecord>& originals,
                                 scoring::DatasetKind dataset);

// Histogram over the nine grid values (or three levels), one row per scorer
// and variant, emitted as CSV.
std::string score_histogram_csv(const std::vector<scoring::ScoreRecord>& records);

struct ShiftCell {
  BootstrapSummary summary;
  bool present = false;
};

// Table-3-style rendering: one row per scorer, the eight interventions as
// columns grouped by concept, "mean (lo/+hi)" cells with 2-decimal means and
// 3-decimal CI offsets, non-significant cells flagged with '~'. Missing cells
// render blank with a footnote.
std::string render_shift_table(
    const std::map<std::string, std::map<std::string, ShiftCell>>& cells);

// CSV with scorer,kind,n,mean,ci_low,ci_high,p,significant rows.
std::string shift_table_csv(
    const std::map<std::string, std::map<std::string, ShiftCell>>& cells);

// LaTeX table body mirroring the aligned-text layout.
std::string shift_table_latex(
    const std::map<std::string, std::map<std::string, ShiftCell>>& cells);

}  // namespace scorelens::analysis
