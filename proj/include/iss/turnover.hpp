#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iss/coding.hpp"
#include "iss/dagtest.hpp"
#include "iss/lattice.hpp"
#include "iss/pvalue.hpp"

namespace iss {

enum class ParentRule { Nearest, Evidence };

std::string parent_rule_name(ParentRule r);
ParentRule parent_rule_from_name(const std::string& name);

struct TurnoverConfig {
    double tau = 0.172;
    double alpha = 0.05;
    double kappa = 0.025;     // screening cutoff, default alpha/2
    double alpha_red = 0.025; // level spent validating in the red part (blue->red claims)
    double alpha_blue = 0.025; // level spent validating in the blue part (red->blue claims)
    ParentRule parent_rule = ParentRule::Evidence;
    Coding coding_red_to_blue = Coding::Binary;
    Coding coding_blue_to_red = Coding::Frequency;
    std::optional<TierConfig> tiering;
    OrderingRule ordering = OrderingRule::RowIndex;
    std::uint64_t seed = 0;
    int threads = 0;

    void validate() const;
};

// One direction of the protocol: screened candidates, the validation forest,
// pre-closure rejections, and the upward-closed selection on the full grid.
struct DirectionResult {
    HypothesisSet screened;
    Polyforest forest;
    RejectionResult test;
    std::vector<int> rejected; // == test.rejected (indices into screened)
    UpwardClosedSet selection;
    std::uint64_t grid_coverage = 0;
    std::int64_t flagged_count = 0;
    double flagged_fraction = 0.0;
};

struct TurnoverResult {
    DirectionResult red_to_blue;
    DirectionResult blue_to_red;
    UpwardClosedSet replicable; // on the blue->red coding's grid
    UpwardClosedSet global;
    std::int64_t replicable_flagged = 0;
    double replicable_flagged_fraction = 0.0;
    std::int64_t global_flagged = 0;
    double global_flagged_fraction = 0.0;
};

// p-values at every distinct observed profile; keeps those with p <= kappa.
HypothesisSet screen(const EncodedDataset& part, double tau, double kappa,
                     OrderingRule ordering = OrderingRule::RowIndex, int threads = 0);

// Re-tests screened candidates on the validation part and closes upward.
// Candidates never observed there keep p_valid = 1.
DirectionResult validate(const HypothesisSet& candidates, const EncodedDataset& validation_part,
                         double alpha_half, const TurnoverConfig& config);

// x replicates iff it is selected at frequency resolution and its binary
// collapse is selected on the other side.
UpwardClosedSet replicable_set(const UpwardClosedSet& freq_sel, const UpwardClosedSet& bin_sel);

// selected in at least one part, reported at frequency resolution
UpwardClosedSet global_set(const UpwardClosedSet& freq_sel, const UpwardClosedSet& bin_sel);

std::pair<std::int64_t, double> flag_fraction(const UpwardClosedSet& selection,
                                              const EncodedDataset& data);

// Full protocol. Inputs are frequency-coded; each direction recodes per config.
TurnoverResult run_turnover(const EncodedDataset& red_freq, const EncodedDataset& blue_freq,
                            const TurnoverConfig& config);

// Single-pass ISS on one dataset (no screening, nearest-cover parenting):
// hypotheses are all distinct observed profiles.
struct IssResult {
    HypothesisSet hypotheses;
    Polyforest forest;
    RejectionResult test;
    UpwardClosedSet selection;
};
IssResult run_iss(const EncodedDataset& data, double tau, double alpha, std::uint64_t seed,
                  OrderingRule ordering = OrderingRule::RowIndex, int threads = 0);

}  // namespace iss
