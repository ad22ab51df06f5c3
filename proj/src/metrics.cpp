#include "iss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iss {

ScreeningRule ScreeningRule::score_cutoff(int k) {
    if (k < 1) throw InputError("score cutoff must be at least 1");
    ScreeningRule rule;
    rule.kind = ScoreCutoff{k};
    rule.label = "score>=" + std::to_string(k);
    return rule;
}

ScreeningRule ScreeningRule::subgroup(UpwardClosedSet set, std::string label) {
    ScreeningRule rule;
    rule.kind = std::move(set);
    rule.label = std::move(label);
    return rule;
}

bool ScreeningRule::flags(const Profile& x, const GridSpec& data_grid) const {
    if (const auto* cutoff = std::get_if<ScoreCutoff>(&kind)) {
        if (cutoff->k > data_grid.dims()) {
            throw InputError("score cutoff exceeds the item count");
        }
        return ace_score(x) >= cutoff->k;
    }
    const auto& set = std::get<UpwardClosedSet>(kind);
    if (set.grid() != data_grid) throw InputError("subgroup rule grid does not match data");
    return set.contains(x);
}

ScreeningReport evaluate_rule(const ScreeningRule& rule, const EncodedDataset& data) {
    ScreeningReport report;
    report.label = rule.label;
    for (const auto& row : data.rows) {
        const bool flagged = rule.flags(row.profile, data.grid);
        if (row.y) {
            flagged ? ++report.tp : ++report.fn;
        } else {
            flagged ? ++report.fp : ++report.tn;
        }
    }
    const auto n = static_cast<double>(data.rows.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.ppr = n > 0 ? static_cast<double>(report.tp + report.fp) / n : nan;
    report.sensitivity = report.tp + report.fn > 0
                             ? static_cast<double>(report.tp) /
                                   static_cast<double>(report.tp + report.fn)
                             : nan;
    report.specificity = report.tn + report.fp > 0
                             ? static_cast<double>(report.tn) /
                                   static_cast<double>(report.tn + report.fp)
                             : nan;
    if (report.tp + report.fp > 0) {
        report.ppv = static_cast<double>(report.tp) / static_cast<double>(report.tp + report.fp);
    } else {
        report.ppv = nan;
        report.ppv_defined = false;
    }
    if (report.tn + report.fn > 0) {
        report.npv = static_cast<double>(report.tn) / static_cast<double>(report.tn + report.fn);
    } else {
        report.npv = nan;
        report.npv_defined = false;
    }
    return report;
}

std::vector<ScreeningReport> cutoff_sweep(const EncodedDataset& data, const std::vector<int>& ks,
                                          const UpwardClosedSet& subgroup) {
    std::vector<ScreeningReport> reports;
    std::vector<int> sorted = ks;
    std::sort(sorted.begin(), sorted.end());
    for (int k : sorted) {
        reports.push_back(evaluate_rule(ScreeningRule::score_cutoff(k), data));
    }
    reports.push_back(evaluate_rule(ScreeningRule::subgroup(subgroup), data));
    return reports;
}

MatchedComparison matched_specificity_compare(const std::vector<ScreeningReport>& reports) {
    if (reports.size() < 2) {
        throw InputError("matched_specificity_compare: need at least one cutoff and the subgroup");
    }
    const ScreeningReport& anchor = reports.back();
    MatchedComparison cmp;
    cmp.anchor_label = anchor.label;
    cmp.anchor_specificity = anchor.specificity;
    cmp.anchor_sensitivity = anchor.sensitivity;

    // prefer the closest specificity at or above the anchor's; fall back to
    // the closest overall when nothing reaches it
    const ScreeningReport* best = nullptr;
    bool best_at_or_above = false;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
        const auto& r = reports[i];
        if (std::isnan(r.specificity)) continue;
        const bool at_or_above = r.specificity >= anchor.specificity;
        const double gap = std::abs(r.specificity - anchor.specificity);
        const bool better = best == nullptr || (at_or_above && !best_at_or_above) ||
                            (at_or_above == best_at_or_above && gap < best_gap);
        if (better) {
            best = &r;
            best_at_or_above = at_or_above;
            best_gap = gap;
        }
    }
    if (best == nullptr) {
        throw InputError("matched_specificity_compare: no usable cutoff report");
    }
    cmp.matched_label = best->label;
    cmp.matched_specificity = best->specificity;
    cmp.matched_sensitivity = best->sensitivity;
    cmp.sensitivity_delta = anchor.sensitivity - best->sensitivity;
    cmp.relative_gain = best->sensitivity > 0
                            ? cmp.sensitivity_delta / best->sensitivity
                            : std::numeric_limits<double>::quiet_NaN();
    return cmp;
}

}  // namespace iss
