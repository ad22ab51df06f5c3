#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iss/coding.hpp"
#include "iss/lattice.hpp"

namespace iss {

// Distinct candidate profiles with their validation p-values and, when the
// candidates came from cross-part screening, the screening p-values.
struct HypothesisSet {
    std::vector<Profile> profiles;
    std::vector<double> p_valid;
    std::vector<double> p_screen; // empty when absent

    std::size_t size() const { return profiles.size(); }
    void validate(const GridSpec& grid) const;
};

// At most one parent per node; parent profiles strictly dominate their children.
struct Polyforest {
    std::vector<int> parent; // -1 marks a root
    std::vector<int> roots;
};

// Leaf-proportional budgets for the current roots.
struct AlphaAllocation {
    std::map<int, double> budget;
};

struct RoundRecord {
    int round = 0;
    std::vector<int> roots;
    std::vector<double> budgets; // aligned with roots
    std::vector<int> rejected;   // hypotheses newly rejected this round
};

struct RejectionResult {
    std::vector<int> rejected; // sorted hypothesis indices
    std::vector<RoundRecord> rounds;
};

// Tier 1 is the highest priority. A node's tier is the best tier among its
// positive-level items; the all-zero profile falls to the lowest tier.
struct TierConfig {
    std::map<std::string, int> item_tiers;
    std::vector<double> tier_weights; // empty = equal weights

    int tier_count() const;
    void validate(const GridSpec& grid) const;
    int node_tier(const Profile& x, const GridSpec& grid) const;
};

// Parent = cover minimizing the l-inf distance; ties drawn uniformly from a
// stream seeded by (seed, node index).
Polyforest build_polyforest_nearest(const HypothesisSet& hyps, const GridSpec& grid,
                                    std::uint64_t seed);

// Parent = cover with the smallest screening p-value; requires p_screen.
Polyforest build_polyforest_evidence(const HypothesisSet& hyps, const GridSpec& grid,
                                     std::uint64_t seed);

// Iterative rejection over the polyforest: leaf-proportional root budgets,
// rejection propagation to every dominating hypothesis, re-rooting of orphaned
// subtrees, repeat until a round rejects nothing.
RejectionResult dag_test(const HypothesisSet& hyps, const Polyforest& forest, double alpha,
                         const GridSpec& grid);

// dag_test with parallel gatekeeping inside each round: roots grouped into
// antichain subsets, each subset tested tier by tier; budget recovered from a
// rejection (share minus p-value) flows to later tiers per tier_weights.
RejectionResult dag_test_tiered(const HypothesisSet& hyps, const Polyforest& forest, double alpha,
                                const TierConfig& tiers, const GridSpec& grid);

struct RiskRatio {
    double value = 1.0;
    bool infinite = false; // unexposed outcome rate was zero
};

// P(Y=1 | item >= 1) / P(Y=1 | item == 0)
RiskRatio marginal_risk_ratio(int item, const EncodedDataset& data);

// One-sided Mantel-Haenszel p-value comparing rows with (item i on, j off)
// against (i off, j on), exactly stratified on the binarized remaining items.
double conditional_dominance_test(int i, int j, const EncodedDataset& data);

// Three tiers ranked by the marginal risk ratios of the binarized items.
TierConfig tiers_from_risk_ratios(const EncodedDataset& data,
                                  const std::vector<int>& tier_sizes = {3, 4, 3});

}  // namespace iss
