#include "iss/pvalue.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "iss/parallel.hpp"

namespace iss {

DominatedSample dominated_sample(const Profile& x, const EncodedDataset& data,
                                 OrderingRule ordering) {
    validate_profile(x, data.grid);
    DominatedSample out;
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
        if (leq(data.rows[r].profile, x, data.grid)) {
            out.source_indices.push_back(static_cast<std::int32_t>(r));
        }
    }
    if (ordering == OrderingRule::LinfDistance) {
        std::stable_sort(out.source_indices.begin(), out.source_indices.end(),
                         [&](std::int32_t a, std::int32_t b) {
                             const int da =
                                 linf_distance(data.rows[static_cast<std::size_t>(a)].profile, x);
                             const int db =
                                 linf_distance(data.rows[static_cast<std::size_t>(b)].profile, x);
                             return da != db ? da < db : a < b;
                         });
    }
    out.responses.reserve(out.source_indices.size());
    for (auto r : out.source_indices) {
        out.responses.push_back(data.rows[static_cast<std::size_t>(r)].y);
    }
    return out;
}

double log_incomplete_beta(double z, int a, int b) {
    if (!(z > 0.0 && z < 1.0)) throw InputError("log_incomplete_beta: z must lie in (0,1)");
    if (a <= 0 || b <= 0) throw InputError("log_incomplete_beta: shapes must be positive");

    // B(z; a, b) = Beta(a, b) * sum_{j=a}^{a+b-1} C(a+b-1, j) z^j (1-z)^{a+b-1-j}
    const long double lz = std::log(static_cast<long double>(z));
    const long double l1mz = std::log1p(static_cast<long double>(-z));
    const int m = a + b - 1;
    const long double lgm1 = std::lgamma(static_cast<long double>(m) + 1.0L);

    std::vector<long double> terms;
    terms.reserve(static_cast<std::size_t>(b));
    long double max_term = -std::numeric_limits<long double>::infinity();
    for (int j = a; j <= m; ++j) {
        const long double lchoose = lgm1 - std::lgamma(static_cast<long double>(j) + 1.0L) -
                                    std::lgamma(static_cast<long double>(m - j) + 1.0L);
        const long double t = lchoose + j * lz + (m - j) * l1mz;
        terms.push_back(t);
        max_term = std::max(max_term, t);
    }
    long double sum = 0;
    for (long double t : terms) sum += std::exp(t - max_term);
    const long double log_tail = max_term + std::log(sum);

    const long double log_beta = std::lgamma(static_cast<long double>(a)) +
                                 std::lgamma(static_cast<long double>(b)) -
                                 std::lgamma(static_cast<long double>(a + b));
    return static_cast<double>(log_beta + log_tail);
}

LogIntTable::LogIntTable(int max_value) {
    values_.resize(static_cast<std::size_t>(std::max(max_value, 1)) + 1);
    values_[0] = -std::numeric_limits<long double>::infinity();
    for (std::size_t i = 1; i < values_.size(); ++i) {
        values_[i] = std::log(static_cast<long double>(i));
    }
}

MinRatioScan::MinRatioScan(double tau, const LogIntTable* table) : table_(table) {
    if (!(tau > 0.0 && tau < 1.0)) throw InputError("iss_pvalue: tau must lie in (0,1)");
    log_tau_ = std::log(static_cast<long double>(tau));
    log_omt_ = std::log1p(static_cast<long double>(-tau));
    // k = 0 state: one Bernoulli(1-tau) trial, threshold a = 1
    log_tail_ = log_omt_;  // P[Bin(1, 1-tau) >= 1] = 1 - tau
    log_pmf_a_ = log_omt_; // pmf(1, 1)
    log_beta_ = 0;         // Beta(1, 1)
}

long double MinRatioScan::log_int(int i) const {
    if (table_ && i <= table_->max_value()) return (*table_)(i);
    return std::log(static_cast<long double>(i));
}

void MinRatioScan::push(bool y) {
    // z = 1 - tau is the tail's success probability; a = k - s + 1, m = k + 1.
    const int m = k_ + 1;
    const int a = k_ - s_ + 1;
    if (y) {
        // threshold unchanged; one more trial can land at a-1 and cross it
        const long double log_pmf_am1 =
            log_pmf_a_ + log_int(a) - log_int(m - a + 1) + log_tau_ - log_omt_;
        const long double delta = log_omt_ + log_pmf_am1 - log_tail_;
        const long double v = std::exp(delta);
        log_tail_ += std::log1p(v);
        log_pmf_a_ += log_int(m + 1) - log_int(m + 1 - a) + log_tau_;
        log_beta_ += log_int(s_ + 1) - log_int(m + 1);
        amplification_ /= 1.0L + v;
        if (amplification_ < 1.0L) amplification_ = 1.0L;
        ++s_;
    } else {
        // threshold rises to a+1; remove the mass that now falls below it
        long double u = std::exp(log_tau_ + log_pmf_a_ - log_tail_);
        if (u >= 1.0L) u = 1.0L - 1e-18L; // analytically <= tau < 1
        log_tail_ += std::log1p(-u);
        log_pmf_a_ += log_int(m + 1) - log_int(a + 1) + log_omt_;
        log_beta_ += log_int(a) - log_int(m + 1);
        amplification_ /= 1.0L - u;
    }
    ++k_;
    ++steps_since_sync_;
    if (amplification_ > 100.0L || steps_since_sync_ >= 4096) resync_tail();
    const double r = log_ratio();
    if (!has_min_ || r < min_log_ratio_) {
        min_log_ratio_ = r;
        argmin_k_ = k_;
        has_min_ = true;
    }
}

void MinRatioScan::resync_tail() {
    const int m = k_ + 1;
    const int a = k_ - s_ + 1;
    const long double z_ratio = std::exp(log_omt_ - log_tau_); // z / (1-z)
    const int mode = static_cast<int>((static_cast<long double>(m) + 1.0L) *
                                      std::exp(log_omt_));
    if (a > mode) {
        // P[Bin >= a] summed upward from pmf(a); terms decay past the mode
        long double c = 1.0L, sum = 1.0L;
        for (int j = a; j < m; ++j) {
            c *= z_ratio * static_cast<long double>(m - j) / static_cast<long double>(j + 1);
            sum += c;
            if (c < 1e-25L * sum) break;
        }
        log_tail_ = log_pmf_a_ + std::log(sum);
    } else {
        // shallow threshold: 1 - P[Bin <= a-1], summed downward from pmf(a-1)
        if (a == 0) {
            log_tail_ = 0.0L;
        } else {
            const long double log_pmf_am1 =
                log_pmf_a_ + log_int(a) - log_int(m - a + 1) + log_tau_ - log_omt_;
            long double c = 1.0L, sum = 1.0L;
            for (int j = a - 1; j >= 1; --j) {
                c *= static_cast<long double>(j) /
                     (z_ratio * static_cast<long double>(m - j + 1));
                sum += c;
                if (c < 1e-25L * sum) break;
            }
            log_tail_ = std::log1p(-std::exp(log_pmf_am1 + std::log(sum)));
        }
    }
    amplification_ = 1.0L;
    steps_since_sync_ = 0;
}

double MinRatioScan::log_ratio() const {
    const int a = k_ - s_ + 1;
    const long double log_num = s_ * log_tau_ + a * log_omt_;
    return static_cast<double>(log_num - log_beta_ - log_tail_);
}

double MinRatioScan::min_log_ratio() const {
    return has_min_ ? static_cast<double>(min_log_ratio_)
                    : std::numeric_limits<double>::infinity();
}

PValue iss_pvalue(const std::vector<std::uint8_t>& responses, double tau,
                  const LogIntTable* table) {
    if (responses.empty()) return PValue{1.0, 0};
    MinRatioScan scan(tau, table);
    for (auto y : responses) scan.push(y != 0);
    PValue p;
    p.value = std::min(1.0, std::exp(scan.min_log_ratio()));
    p.argmin_k = scan.argmin_k();
    return p;
}

PValue iss_pvalue(const Profile& x, const EncodedDataset& data, double tau,
                  OrderingRule ordering) {
    const DominatedSample sample = dominated_sample(x, data, ordering);
    return iss_pvalue(sample.responses, tau);
}

PValueEngine::PValueEngine(const EncodedDataset& data, double tau, OrderingRule ordering,
                           int threads)
    : data_(data),
      tau_(tau),
      ordering_(ordering),
      threads_(threads),
      table_(static_cast<int>(data.rows.size()) + 2) {
    if (!(tau > 0.0 && tau < 1.0)) throw InputError("PValueEngine: tau must lie in (0,1)");
    std::unordered_map<Profile, std::int32_t, ProfileHash> index;
    row_pid_.resize(data.rows.size());
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
        auto [it, inserted] = index.try_emplace(data.rows[r].profile,
                                                static_cast<std::int32_t>(distinct_.size()));
        if (inserted) distinct_.push_back(data.rows[r].profile);
        row_pid_[r] = it->second;
    }
    // remap ids to lexicographic rank so downstream ordering never depends on
    // row arrival order
    std::vector<std::int32_t> rank(distinct_.size());
    std::vector<std::int32_t> order(distinct_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::int32_t>(i);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        return distinct_[static_cast<std::size_t>(a)] < distinct_[static_cast<std::size_t>(b)];
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        rank[static_cast<std::size_t>(order[pos])] = static_cast<std::int32_t>(pos);
    }
    std::sort(distinct_.begin(), distinct_.end());
    for (auto& pid : row_pid_) pid = rank[static_cast<std::size_t>(pid)];
}

std::vector<PValue> PValueEngine::pvalues_at(const std::vector<Profile>& hypotheses) const {
    std::vector<PValue> out(hypotheses.size());
    const std::size_t n_distinct = distinct_.size();
    parallel_for(static_cast<std::int64_t>(hypotheses.size()), threads_, [&](std::int64_t h) {
        const Profile& x = hypotheses[static_cast<std::size_t>(h)];
        validate_profile(x, data_.grid);
        // per-hypothesis dominance mask over distinct profiles
        std::vector<std::uint8_t> dominated(n_distinct);
        for (std::size_t u = 0; u < n_distinct; ++u) {
            dominated[u] = leq(distinct_[u], x, data_.grid) ? 1 : 0;
        }
        MinRatioScan scan(tau_, &table_);
        int pushed = 0;
        if (ordering_ == OrderingRule::RowIndex) {
            for (std::size_t r = 0; r < data_.rows.size(); ++r) {
                if (dominated[static_cast<std::size_t>(row_pid_[r])]) {
                    scan.push(data_.rows[r].y != 0);
                    ++pushed;
                }
            }
        } else {
            std::vector<std::int32_t> rows;
            for (std::size_t r = 0; r < data_.rows.size(); ++r) {
                if (dominated[static_cast<std::size_t>(row_pid_[r])]) {
                    rows.push_back(static_cast<std::int32_t>(r));
                }
            }
            std::stable_sort(rows.begin(), rows.end(), [&](std::int32_t a, std::int32_t b) {
                const int da = linf_distance(data_.rows[static_cast<std::size_t>(a)].profile, x);
                const int db = linf_distance(data_.rows[static_cast<std::size_t>(b)].profile, x);
                return da != db ? da < db : a < b;
            });
            for (auto r : rows) {
                scan.push(data_.rows[static_cast<std::size_t>(r)].y != 0);
                ++pushed;
            }
        }
        PValue p;
        if (pushed > 0) {
            p.value = std::min(1.0, std::exp(scan.min_log_ratio()));
            p.argmin_k = scan.argmin_k();
        }
        out[static_cast<std::size_t>(h)] = p;
    });
    return out;
}

}  // namespace iss
