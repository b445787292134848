#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "error.hpp"

namespace clir {

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    /// F1 is the plain harmonic mean (beta = 1), zero when p + r == 0.
    static RougeScore from_counts(std::size_t matched, std::size_t hyp_len, std::size_t ref_len)
    {
        RougeScore s;
        s.precision = hyp_len == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(hyp_len);
        s.recall = ref_len == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(ref_len);
        double sum = s.precision + s.recall;
        s.f1 = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
        return s;
    }

    friend bool operator==(const RougeScore&, const RougeScore&) = default;
};

/// Clipped unigram overlap.
inline RougeScore rouge_1(std::span<const std::string> hyp, std::span<const std::string> ref)
{
    std::unordered_map<std::string_view, std::size_t> ref_counts;
    for (const auto& t : ref) ++ref_counts[t];
    std::size_t overlap = 0;
    for (const auto& t : hyp) {
        auto it = ref_counts.find(t);
        if (it != ref_counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    return RougeScore::from_counts(overlap, hyp.size(), ref.size());
}

inline std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b)
{
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> row(b.size() + 1, 0);
    for (const auto& x : a) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            row[j + 1] = x == b[j] ? prev[j] + 1 : std::max(prev[j + 1], row[j]);
        }
        std::swap(prev, row);
    }
    return prev[b.size()];
}

/// Sentence-level ROUGE-L over a single hypothesis/reference pair.
inline RougeScore rouge_l(std::span<const std::string> hyp, std::span<const std::string> ref)
{
    return RougeScore::from_counts(lcs_length(hyp, ref), hyp.size(), ref.size());
}

/// Macro average: precision, recall and f1 are each averaged on their own.
inline RougeScore aggregate(std::span<const RougeScore> scores)
{
    if (scores.empty()) {
        throw UsageError("cannot aggregate an empty list of scores");
    }
    RougeScore mean;
    for (const auto& s : scores) {
        mean.precision += s.precision;
        mean.recall += s.recall;
        mean.f1 += s.f1;
    }
    auto n = static_cast<double>(scores.size());
    mean.precision /= n;
    mean.recall /= n;
    mean.f1 /= n;
    return mean;
}

}  // namespace clir
