#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "iss/coding.hpp"
#include "iss/lattice.hpp"

namespace iss {

// Order in which dominated observations enter the prefix scan. Any
// outcome-independent rule keeps the p-value anytime-valid; row index is the
// reproducible default.
enum class OrderingRule { RowIndex, LinfDistance };

struct DominatedSample {
    std::vector<std::uint8_t> responses; // Y_(1) .. Y_(n(x))
    std::vector<std::int32_t> source_indices;

    std::size_t size() const { return responses.size(); }
};

struct PValue {
    double value = 1.0; // in (0, 1]
    int argmin_k = 0;   // prefix length attaining the minimum; 0 when n(x) = 0
};

// All rows whose profile is coordinate-wise <= x, in the requested order.
DominatedSample dominated_sample(const Profile& x, const EncodedDataset& data,
                                 OrderingRule ordering = OrderingRule::RowIndex);

// log of the lower incomplete Beta integral over [0, z] for positive integer
// shapes, via the exact binomial-sum identity accumulated in log space.
double log_incomplete_beta(double z, int a, int b);

// Shared log(i) lookup so prefix scans avoid per-step log calls.
class LogIntTable {
public:
    explicit LogIntTable(int max_value);
    long double operator()(int i) const { return values_[static_cast<std::size_t>(i)]; }
    int max_value() const { return static_cast<int>(values_.size()) - 1; }

private:
    std::vector<long double> values_;
};

// Streaming evaluator of the prefix ratio
//
//   r_k = tau^{S_k} (1-tau)^{k-S_k+1} / B(1-tau; k-S_k+1, S_k+1)
//
// updated in O(1) per observation. The incomplete Beta factors into a Beta
// constant times a binomial tail, and both admit one-term updates when an
// observation arrives. Internals are long double so a 10^4-step scan stays
// within 1e-12 of exact arithmetic.
class MinRatioScan {
public:
    explicit MinRatioScan(double tau, const LogIntTable* table = nullptr);

    void push(bool y);

    int count() const { return k_; }
    int successes() const { return s_; }
    double log_ratio() const;     // at the current prefix length
    double min_log_ratio() const; // over 1 <= k <= count()
    int argmin_k() const { return argmin_k_; }

private:
    long double log_int(int i) const;
    void resync_tail(); // re-derives log_tail_ from log_pmf_a_ via a stable series

    const LogIntTable* table_;
    long double log_tau_, log_omt_; // log tau, log(1 - tau)
    int k_ = 0;
    int s_ = 0;
    // state for m = k+1 trials, threshold a = k-s+1
    long double log_tail_;  // log P[Bin(m, 1-tau) >= a]
    long double log_pmf_a_; // log pmf(m, a) under Bin(m, 1-tau)
    long double log_beta_;  // log Beta(a, s+1)
    // the subtraction step multiplies relative error by T/T'; resync before
    // the compounded factor can matter
    long double amplification_ = 1.0L;
    int steps_since_sync_ = 0;
    long double min_log_ratio_ = 0;
    int argmin_k_ = 0;
    bool has_min_ = false;
};

// p_tau(x) = min_k r_k clipped to (0, 1]; 1 when the dominated sample is empty.
PValue iss_pvalue(const Profile& x, const EncodedDataset& data, double tau,
                  OrderingRule ordering = OrderingRule::RowIndex);
PValue iss_pvalue(const std::vector<std::uint8_t>& responses, double tau,
                  const LogIntTable* table = nullptr);

// Batch evaluator sharing the distinct-profile index, dominance masks, and
// log table across many hypotheses. Results match the single-shot path.
class PValueEngine {
public:
    PValueEngine(const EncodedDataset& data, double tau, OrderingRule ordering, int threads = 0);

    // lexicographically sorted distinct observed profiles
    const std::vector<Profile>& distinct_profiles() const { return distinct_; }

    std::vector<PValue> pvalues_at(const std::vector<Profile>& hypotheses) const;

private:
    const EncodedDataset& data_;
    double tau_;
    OrderingRule ordering_;
    int threads_;
    std::vector<Profile> distinct_;
    std::vector<std::int32_t> row_pid_; // row -> index into distinct_
    LogIntTable table_;
};

}  // namespace iss
