#include "iss/turnover.hpp"

#include <algorithm>

namespace iss {

std::string parent_rule_name(ParentRule r) {
    return r == ParentRule::Nearest ? "nearest" : "evidence";
}

ParentRule parent_rule_from_name(const std::string& name) {
    if (name == "nearest") return ParentRule::Nearest;
    if (name == "evidence") return ParentRule::Evidence;
    throw InputError("unknown parent_rule '" + name + "' (expected nearest|evidence)");
}

void TurnoverConfig::validate() const {
    if (!(tau > 0 && tau < 1)) throw InputError("config: tau must lie in (0,1)");
    if (!(alpha > 0 && alpha < 1)) throw InputError("config: alpha must lie in (0,1)");
    if (!(kappa > 0 && kappa < 1)) throw InputError("config: kappa must lie in (0,1)");
    if (!(alpha_red > 0 && alpha_blue > 0)) {
        throw InputError("config: per-part validation levels must be positive");
    }
    if (alpha_red + alpha_blue > alpha + 1e-12) {
        throw InputError("config: alpha_red + alpha_blue must not exceed alpha");
    }
}

HypothesisSet screen(const EncodedDataset& part, double tau, double kappa, OrderingRule ordering,
                     int threads) {
    PValueEngine engine(part, tau, ordering, threads);
    const auto& profiles = engine.distinct_profiles();
    const auto pvalues = engine.pvalues_at(profiles);
    HypothesisSet screened;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        if (pvalues[i].value <= kappa) {
            screened.profiles.push_back(profiles[i]);
            screened.p_screen.push_back(pvalues[i].value);
        }
    }
    return screened;
}

DirectionResult validate(const HypothesisSet& candidates, const EncodedDataset& validation_part,
                         double alpha_half, const TurnoverConfig& config) {
    DirectionResult out;
    out.screened = candidates;
    const GridSpec& grid = validation_part.grid;

    if (candidates.profiles.empty()) {
        out.selection = UpwardClosedSet::from_corners(grid, {});
        return out;
    }

    PValueEngine engine(validation_part, config.tau, config.ordering, config.threads);
    const auto pvalues = engine.pvalues_at(candidates.profiles);
    out.screened.p_valid.clear();
    out.screened.p_valid.reserve(pvalues.size());
    for (const auto& p : pvalues) out.screened.p_valid.push_back(p.value);

    out.forest = config.parent_rule == ParentRule::Evidence
                     ? build_polyforest_evidence(out.screened, grid, config.seed)
                     : build_polyforest_nearest(out.screened, grid, config.seed);

    out.test = config.tiering ? dag_test_tiered(out.screened, out.forest, alpha_half,
                                                *config.tiering, grid)
                              : dag_test(out.screened, out.forest, alpha_half, grid);
    out.rejected = out.test.rejected;

    std::vector<Profile> rejected_profiles;
    rejected_profiles.reserve(out.rejected.size());
    for (int i : out.rejected) {
        rejected_profiles.push_back(out.screened.profiles[static_cast<std::size_t>(i)]);
    }
    out.selection = UpwardClosedSet::from_corners(grid, std::move(rejected_profiles));
    out.grid_coverage = out.selection.closure_count();
    return out;
}

UpwardClosedSet replicable_set(const UpwardClosedSet& freq_sel, const UpwardClosedSet& bin_sel) {
    if (freq_sel.grid() == bin_sel.grid()) return set_intersection(freq_sel, bin_sel);
    return set_intersection(freq_sel, lift_set(bin_sel, freq_sel.grid()));
}

UpwardClosedSet global_set(const UpwardClosedSet& freq_sel, const UpwardClosedSet& bin_sel) {
    if (freq_sel.grid() == bin_sel.grid()) return set_union(freq_sel, bin_sel);
    return set_union(freq_sel, lift_set(bin_sel, freq_sel.grid()));
}

std::pair<std::int64_t, double> flag_fraction(const UpwardClosedSet& selection,
                                              const EncodedDataset& data) {
    if (selection.grid() != data.grid) throw InputError("flag_fraction: grid mismatch");
    std::int64_t count = 0;
    for (const auto& row : data.rows) {
        if (selection.contains(row.profile)) ++count;
    }
    const double frac =
        data.rows.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(data.rows.size());
    return {count, frac};
}

namespace {

EncodedDataset recode(const EncodedDataset& freq, Coding coding) {
    switch (coding) {
        case Coding::Frequency: return freq;
        case Coding::Binary: return coarsen_dataset(freq);
        case Coding::Score: return score_chain(freq);
    }
    return freq;
}

EncodedDataset concat(const EncodedDataset& a, const EncodedDataset& b) {
    EncodedDataset out;
    out.grid = a.grid;
    out.rows = a.rows;
    out.rows.insert(out.rows.end(), b.rows.begin(), b.rows.end());
    return out;
}

}  // namespace

TurnoverResult run_turnover(const EncodedDataset& red_freq, const EncodedDataset& blue_freq,
                            const TurnoverConfig& config) {
    config.validate();
    if (red_freq.grid != blue_freq.grid) throw InputError("run_turnover: parts on different grids");

    TurnoverResult result;

    // red -> blue: screened on red, validated in blue at alpha_blue
    {
        const EncodedDataset red = recode(red_freq, config.coding_red_to_blue);
        const EncodedDataset blue = recode(blue_freq, config.coding_red_to_blue);
        HypothesisSet candidates =
            screen(red, config.tau, config.kappa, config.ordering, config.threads);
        result.red_to_blue = validate(candidates, blue, config.alpha_blue, config);
        const EncodedDataset whole = concat(red, blue);
        auto [count, frac] = flag_fraction(result.red_to_blue.selection, whole);
        result.red_to_blue.flagged_count = count;
        result.red_to_blue.flagged_fraction = frac;
    }

    // blue -> red: screened on blue, validated in red at alpha_red
    {
        const EncodedDataset red = recode(red_freq, config.coding_blue_to_red);
        const EncodedDataset blue = recode(blue_freq, config.coding_blue_to_red);
        HypothesisSet candidates =
            screen(blue, config.tau, config.kappa, config.ordering, config.threads);
        result.blue_to_red = validate(candidates, red, config.alpha_red, config);
        const EncodedDataset whole = concat(red, blue);
        auto [count, frac] = flag_fraction(result.blue_to_red.selection, whole);
        result.blue_to_red.flagged_count = count;
        result.blue_to_red.flagged_fraction = frac;
    }

    result.replicable = replicable_set(result.blue_to_red.selection, result.red_to_blue.selection);
    result.global = global_set(result.blue_to_red.selection, result.red_to_blue.selection);

    const EncodedDataset whole_fine = concat(recode(red_freq, config.coding_blue_to_red),
                                             recode(blue_freq, config.coding_blue_to_red));
    auto [rc, rf] = flag_fraction(result.replicable, whole_fine);
    result.replicable_flagged = rc;
    result.replicable_flagged_fraction = rf;
    auto [gc, gf] = flag_fraction(result.global, whole_fine);
    result.global_flagged = gc;
    result.global_flagged_fraction = gf;
    return result;
}

IssResult run_iss(const EncodedDataset& data, double tau, double alpha, std::uint64_t seed,
                  OrderingRule ordering, int threads) {
    IssResult out;
    PValueEngine engine(data, tau, ordering, threads);
    out.hypotheses.profiles = engine.distinct_profiles();
    const auto pvalues = engine.pvalues_at(out.hypotheses.profiles);
    out.hypotheses.p_valid.reserve(pvalues.size());
    for (const auto& p : pvalues) out.hypotheses.p_valid.push_back(p.value);
    out.forest = build_polyforest_nearest(out.hypotheses, data.grid, seed);
    out.test = dag_test(out.hypotheses, out.forest, alpha, data.grid);
    std::vector<Profile> rejected_profiles;
    for (int i : out.test.rejected) {
        rejected_profiles.push_back(out.hypotheses.profiles[static_cast<std::size_t>(i)]);
    }
    out.selection = UpwardClosedSet::from_corners(data.grid, std::move(rejected_profiles));
    return out;
}

}  // namespace iss
