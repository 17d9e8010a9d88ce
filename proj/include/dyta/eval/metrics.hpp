#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

namespace dyta::eval {

/// nDCG@K with a single relevant item: IDCG is 1.
inline double ndcg_single(int gt_position, int k)
{
    if (gt_position < 1 || gt_position > k) {
        return 0.0;
    }
    return 1.0 / std::log2(1.0 + gt_position);
}

inline int hr_single(int gt_position, int n)
{
    return gt_position >= 1 && gt_position <= n ? 1 : 0;
}

struct Metrics {
    double ndcg_at_5 = 0.0;
    double ndcg_at_10 = 0.0;
    double hr_at_3 = 0.0;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Accumulates ground-truth ranks as a histogram, so the mean is independent
/// of the order in which users are added.
class RankAccumulator {
public:
    void add(int gt_position) { ++counts_[gt_position]; }
    void merge(const RankAccumulator& other)
    {
        for (const auto& [p, c] : other.counts_) {
            counts_[p] += c;
        }
    }
    [[nodiscard]] std::uint64_t count() const
    {
        std::uint64_t n = 0;
        for (const auto& [p, c] : counts_) {
            n += c;
        }
        return n;
    }
    [[nodiscard]] const std::map<int, std::uint64_t>& histogram() const { return counts_; }

    [[nodiscard]] Metrics mean() const
    {
        Metrics m;
        const auto n = count();
        if (n == 0) {
            return m;
        }
        for (const auto& [p, c] : counts_) {
            const auto w = static_cast<double>(c);
            m.ndcg_at_5 += w * ndcg_single(p, 5);
            m.ndcg_at_10 += w * ndcg_single(p, 10);
            m.hr_at_3 += w * hr_single(p, 3);
        }
        const auto d = static_cast<double>(n);
        m.ndcg_at_5 /= d;
        m.ndcg_at_10 /= d;
        m.hr_at_3 /= d;
        return m;
    }

private:
    std::map<int, std::uint64_t> counts_;
};

/// Mean over runs, summed in sorted order per metric.
inline Metrics mean_over_runs(const std::vector<Metrics>& runs)
{
    Metrics out;
    if (runs.empty()) {
        return out;
    }
    auto mean_of = [&](double Metrics::*field) {
        std::vector<double> v;
        v.reserve(runs.size());
        for (const auto& r : runs) {
            v.push_back(r.*field);
        }
        std::sort(v.begin(), v.end());
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    out.ndcg_at_5 = mean_of(&Metrics::ndcg_at_5);
    out.ndcg_at_10 = mean_of(&Metrics::ndcg_at_10);
    out.hr_at_3 = mean_of(&Metrics::hr_at_3);
    return out;
}

struct RatingDistribution {
    std::array<double, 5> probability{};
    std::array<std::uint64_t, 5> counts{};
};

inline RatingDistribution rating_distribution(const std::vector<int>& ratings)
{
    RatingDistribution d;
    for (int r : ratings) {
        if (r >= 1 && r <= 5) {
            ++d.counts[static_cast<std::size_t>(r - 1)];
        }
    }
    const auto total = std::accumulate(d.counts.begin(), d.counts.end(), std::uint64_t{0});
    if (total > 0) {
        for (std::size_t i = 0; i < 5; ++i) {
            d.probability[i] = static_cast<double>(d.counts[i]) / static_cast<double>(total);
        }
    }
    return d;
}

/// 0.5 * sum |p_i - q_i| over matching bins.
template <typename P, typename Q>
double total_variation(const P& p, const Q& q)
{
    double sum = 0.0;
    auto pi = std::begin(p);
    auto qi = std::begin(q);
    for (; pi != std::end(p) && qi != std::end(q); ++pi, ++qi) {
        sum += std::abs(*pi - *qi);
    }
    return 0.5 * sum;
}

struct RatingAlignment {
    RatingDistribution simulated;
    RatingDistribution ground_truth;
    double tv_distance = 0.0;
};

inline RatingAlignment rating_distribution_analysis(const std::vector<int>& simulated,
                                                    const std::vector<int>& ground_truth)
{
    RatingAlignment out;
    out.simulated = rating_distribution(simulated);
    out.ground_truth = rating_distribution(ground_truth);
    // From counts: sum |c_i M - d_i N| / 2NM is exact in integers, so the
    // result is the correctly rounded distance rather than a sum of rounded terms.
    const auto n = std::accumulate(out.simulated.counts.begin(), out.simulated.counts.end(), std::uint64_t{0});
    const auto m = std::accumulate(out.ground_truth.counts.begin(), out.ground_truth.counts.end(), std::uint64_t{0});
    if (n == 0 || m == 0) {
        out.tv_distance = total_variation(out.simulated.probability, out.ground_truth.probability);
        return out;
    }
    unsigned __int128 numerator = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        const auto a = static_cast<unsigned __int128>(out.simulated.counts[i]) * m;
        const auto b = static_cast<unsigned __int128>(out.ground_truth.counts[i]) * n;
        numerator += a > b ? a - b : b - a;
    }
    out.tv_distance = static_cast<double>(static_cast<long double>(numerator)
                                          / (2.0L * static_cast<long double>(n) * static_cast<long double>(m)));
    return out;
}

} // namespace dyta::eval
