#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "error.hpp"
#include "interventions.hpp"

namespace scorelens::analysis {

using scoring::ScoreRecord;

std::vector<double> PairedScoreSet::delta_values() const {
  std::vector<double> out;
  out.reserve(deltas.size());
  for (const auto& [id, d] : deltas) out.push_back(d);
  return out;
}

PairedScoreSet pair_scores(const std::vector<ScoreRecord>& originals,
                           const std::vector<ScoreRecord>& counterfactuals) {
  PairedScoreSet out;
  if (originals.empty() && counterfactuals.empty()) return out;

  auto scale_of = [](const ScoreRecord& r) { return r.normalized_level.has_value(); };
  const ScoreRecord* probe = !originals.empty() ? &originals.front() : &counterfactuals.front();
  out.scorer_id = probe->scorer_id;
  const bool level_scale = scale_of(*probe);
  if (!counterfactuals.empty()) out.kind = counterfactuals.front().variant;

  std::map<std::string, const ScoreRecord*> or_by_id;
  for (const auto& r : originals) {
    if (r.scorer_id != out.scorer_id)
      throw ValidationError("pair_scores: mixed scorer ids ('" + r.scorer_id + "' vs '" +
                            out.scorer_id + "')");
    if (scale_of(r) != level_scale)
      throw ValidationError("pair_scores: mixed score scales in the original records");
    or_by_id[r.essay_id] = &r;
  }
  std::set<std::string> paired;
  for (const auto& r : counterfactuals) {
    if (r.scorer_id != out.scorer_id)
      throw ValidationError("pair_scores: mixed scorer ids ('" + r.scorer_id + "' vs '" +
                            out.scorer_id + "')");
    if (scale_of(r) != level_scale)
      throw ValidationError("pair_scores: original and counterfactual scales differ");
    const auto it = or_by_id.find(r.essay_id);
    if (it == or_by_id.end()) {
      out.unpaired.push_back(r.essay_id + ": no original score");
      continue;
    }
    paired.insert(r.essay_id);
    out.deltas.emplace_back(r.essay_id, r.numeric_value() - it->second->numeric_value());
  }
  for (const auto& r : originals) {
    if (paired.count(r.essay_id) == 0)
      out.unpaired.push_back(r.essay_id + ": no counterfactual score");
  }
  return out;
}

AgreementReport agreement_report(const corpus::Corpus& corpus,
                                 const std::vector<ScoreRecord>& originals,
                                 scoring::DatasetKind dataset) {
  std::vector<int> gold_cat, pred_cat;
  std::vector<double> gold_num, pred_num;
  for (const auto& r : originals) {
    const corpus::Essay* essay = corpus.find(r.essay_id);
    if (essay == nullptr || !essay->gold) continue;
    if (dataset == scoring::DatasetKind::ellipse_like) {
      if (!essay->gold->numeric) continue;
      const double g = scoring::normalize_score(*essay->gold->numeric);
      const double p = r.normalized ? *r.normalized
                                    : scoring::level_midpoint(*r.normalized_level);
      gold_num.push_back(g);
      pred_num.push_back(scoring::normalize_score(p));
      // grid value -> ordinal category index 0..8
      gold_cat.push_back(static_cast<int>(std::lround((g - 1.0) * 2.0)));
      pred_cat.push_back(static_cast<int>(std::lround((scoring::normalize_score(p) - 1.0) * 2.0)));
    } else {
      scoring::Level g;
      if (essay->gold->level) {
        g = *essay->gold->level;
      } else if (essay->gold->numeric) {
        g = scoring::level_of(scoring::normalize_score(*essay->gold->numeric));
      } else {
        continue;
      }
      const scoring::Level p = r.normalized_level
                                   ? *r.normalized_level
                                   : scoring::level_of(*r.normalized);
      gold_cat.push_back(static_cast<int>(g));
      pred_cat.push_back(static_cast<int>(p));
    }
  }
  if (gold_cat.empty())
    throw ValidationError("agreement_report: no records with gold labels to compare");

  AgreementReport rep;
  rep.n = gold_cat.size();
  if (dataset == scoring::DatasetKind::ellipse_like) {
    rep.qwk = stats::qwk(gold_cat, pred_cat, 9);
    rep.rmse = stats::rmse(gold_num, pred_num);
  } else {
    rep.qwk = stats::qwk(gold_cat, pred_cat, 3);
    rep.weighted_f1 = stats::weighted_f1(gold_cat, pred_cat, 3);
  }
  return rep;
}

std::string score_histogram_csv(const std::vector<ScoreRecord>& records) {
  // (scorer, variant) -> bin -> count; numeric bins are the nine grid values
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::size_t>> hist;
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& r : records) {
    std::string bin;
    if (r.normalized) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "%.1f", *r.normalized);
      bin = buf;
    } else if (r.normalized_level) {
      bin = scoring::to_string(*r.normalized_level);
    } else {
      continue;
    }
    keys.insert({r.scorer_id, r.variant});
    ++hist[{r.scorer_id, r.variant}][bin];
  }
  std::ostringstream out;
  out << "scorer,variant,bin,count\n";
  static const char* numeric_bins[] = {"1.0", "1.5", "2.0", "2.5", "3.0", "3.5", "4.0", "4.5", "5.0"};
  static const char* level_bins[] = {"Low", "Medium", "High"};
  for (const auto& key : keys) {
    const auto& counts = hist[key];
    const bool level = counts.count("Low") || counts.count("Medium") || counts.count("High");
    if (level) {
      for (const char* bin : level_bins) {
        const auto it = counts.find(bin);
        out << key.first << ',' << key.second << ',' << bin << ','
            << (it == counts.end() ? 0 : it->second) << '\n';
      }
    } else {
      for (const char* bin : numeric_bins) {
        const auto it = counts.find(bin);
        out << key.first << ',' << key.second << ',' << bin << ','
            << (it == counts.end() ? 0 : it->second) << '\n';
      }
    }
  }
  return out.str();
}

namespace {

std::string format_offset(double value) {
  // 3 decimals, no leading zero: -.033 / +.032
  char buf[16];
  std::snprintf(buf, sizeof buf, "%+.3f", value);
  std::string s = buf;
  const auto zero = s.find("0.");
  if (zero == 1) s.erase(1, 1);
  return s;
}

std::string format_cell(const ShiftCell& cell) {
  if (!cell.present) return "";
  const auto& s = cell.summary;
  char mean[16];
  std::snprintf(mean, sizeof mean, "%.2f", s.mean);
  std::string out = std::string(mean) + " (" + format_offset(s.ci_low - s.mean) + "/" +
                    format_offset(s.ci_high - s.mean) + ")";
  if (!s.significant) out += " ~";
  return out;
}

const std::vector<std::string>& column_order() {
  static const std::vector<std::string> cols = []() {
    std::vector<std::string> out;
    for (auto k : interventions::all_kinds()) out.push_back(interventions::to_string(k));
    return out;
  }();
  return cols;
}

}  // namespace

std::string render_shift_table(
    const std::map<std::string, std::map<std::string, ShiftCell>>& cells) {
  const auto& cols = column_order();
  std::vector<std::size_t> widths;
  widths.push_back(std::string("scorer").size());
  for (const auto& [scorer, row] : cells) widths[0] = std::max(widths[0], scorer.size());
  for (const auto& col : cols) {
    std::size_t w = col.size();
    for (const auto& [scorer, row] : cells) {
      const auto it = row.find(col);
      if (it != row.end()) w = std::max(w, format_cell(it->second).size());
    }
    widths.push_back(w);
  }

  std::ostringstream out;
  out << "Mean score shifts (delta = counterfactual - original)\n";
  out << "concept groups: Conventions [ErrorCorrection SpellingErrors SvaErrors WordOrderSwap]  "
         "Language Complexity [Complexification Simplification]  Organization [IntraParaShuffle "
         "InterTextShuffle]\n\n";
  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  out << pad("scorer", widths[0]);
  for (std::size_t c = 0; c < cols.size(); ++c) out << "  " << pad(cols[c], widths[c + 1]);
  out << '\n';
  bool missing = false;
  for (const auto& [scorer, row] : cells) {
    out << pad(scorer, widths[0]);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto it = row.find(cols[c]);
      std::string cell = it == row.end() ? "" : format_cell(it->second);
      if (cell.empty()) {
        cell = "-";
        missing = true;
      }
      out << "  " << pad(cell, widths[c + 1]);
    }
    out << '\n';
  }
  out << "\nCI offsets from 10,000-iteration percentile bootstrap unless configured otherwise; "
         "'~' marks non-significant cells (p > 0.01).\n";
  if (missing) out << "'-' marks (scorer, intervention) cells with no scored pairs.\n";
  return out.str();
}

std::string shift_table_csv(
    const std::map<std::string, std::map<std::string, ShiftCell>>& cells) {
  std::ostringstream out;
  out << "scorer,kind,n,mean,ci_low,ci_high,p,significant\n";
  out.precision(10);
  for (const auto& [scorer, row] : cells) {
    for (const auto& col : column_order()) {
      const auto it = row.find(col);
      if (it == row.end() || !it->second.present) continue;
      const auto& s = it->second.summary;
      out << scorer << ',' << col << ',' << s.n << ',' << s.mean << ',' << s.ci_low << ','
          << s.ci_high << ',' << s.p << ',' << (s.significant ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string shift_table_latex(
    const std::map<std::string, std::map<std::string, ShiftCell>>& cells) {
  std::ostringstream out;
  out << "% columns: scorer + " << column_order().size() << " interventions\n";
  for (const auto& [scorer, row] : cells) {
    out << scorer;
    for (const auto& col : column_order()) {
      const auto it = row.find(col);
      if (it == row.end() || !it->second.present) {
        out << " & ";
        continue;
      }
      const auto& s = it->second.summary;
      char mean[16];
      std::snprintf(mean, sizeof mean, "%.2f", s.mean);
      std::string cell = std::string("$") + mean + "_{" + format_offset(s.ci_low - s.mean) +
                         "}^{" + format_offset(s.ci_high - s.mean) + "}$";
      if (!s.significant) cell = "{\\color{black!30} " + cell + " }";
      out << " & " << cell;
    }
    out << " \\\\\n";
  }
  return out.str();
}

}  // namespace scorelens::analysis
