#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "iss/coding.hpp"
#include "iss/lattice.hpp"

namespace iss {

// Either "flag when the item count reaches K" or "flag when the profile lies
// in an upward-closed subgroup".
struct ScreeningRule {
    struct ScoreCutoff {
        int k;
    };
    std::variant<ScoreCutoff, UpwardClosedSet> kind;
    std::string label;

    static ScreeningRule score_cutoff(int k);
    static ScreeningRule subgroup(UpwardClosedSet set, std::string label = "subgroup");

    bool flags(const Profile& x, const GridSpec& data_grid) const;
};

struct ScreeningReport {
    std::string label;
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    double ppr = 0;
    double sensitivity = 0, specificity = 0, ppv = 0, npv = 0;
    bool ppv_defined = true, npv_defined = true;
};

// Sample-proportion confusion metrics of a rule against the observed outcome.
ScreeningReport evaluate_rule(const ScreeningRule& rule, const EncodedDataset& data);

// One report per cutoff plus one for the subgroup rule, cutoffs first.
std::vector<ScreeningReport> cutoff_sweep(const EncodedDataset& data, const std::vector<int>& ks,
                                          const UpwardClosedSet& subgroup);

struct MatchedComparison {
    std::string anchor_label;  // the subgroup (last) report
    std::string matched_label; // cutoff with the closest (>= when possible) specificity
    double anchor_specificity = 0, matched_specificity = 0;
    double anchor_sensitivity = 0, matched_sensitivity = 0;
    double sensitivity_delta = 0;
    double relative_gain = 0; // delta / matched sensitivity
};

// Aligns the subgroup rule with the score cutoff of nearest specificity and
// compares sensitivities. Reports must come from cutoff_sweep (subgroup last).
MatchedComparison matched_specificity_compare(const std::vector<ScreeningReport>& reports);

}  // namespace iss
