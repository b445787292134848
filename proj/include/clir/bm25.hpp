#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"

namespace clir {

struct Bm25Params {
    double k1 = 1.5;
    double b = 0.75;

    void validate() const
    {
        if (!std::isfinite(k1) || k1 < 0.0) {
            throw UsageError("bm25 k1 must be a finite value >= 0");
        }
        if (!std::isfinite(b) || b < 0.0 || b > 1.0) {
            throw UsageError("bm25 b must lie in [0, 1]");
        }
    }
};

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Okapi BM25 with idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), which is
/// positive for every df, so scores are never negative.
inline double bm25_idf(std::size_t df, std::size_t n_docs)
{
    auto n = static_cast<double>(n_docs);
    auto d = static_cast<double>(df);
    return std::log1p((n - d + 0.5) / (d + 0.5));
}

/// Inverted index over one user profile. Immutable once built.
class Bm25Index {
public:
    struct Posting {
        std::uint32_t doc;  // position in doc_ids()
        std::uint32_t tf;
    };

    Bm25Index(std::span<const Document> docs, Bm25Params params = {}) : params_(params)
    {
        params_.validate();
        if (docs.empty()) {
            throw UsageError("cannot build a BM25 index over zero documents");
        }
        doc_ids_.reserve(docs.size());
        doc_len_.reserve(docs.size());
        std::uint64_t total_len = 0;
        for (const auto& doc : docs) {
            auto position = static_cast<std::uint32_t>(doc_ids_.size());
            if (!by_id_.emplace(doc.id(), position).second) {
                throw UsageError("duplicate document id '" + doc.id() + "'");
            }
            doc_ids_.push_back(doc.id());
            doc_len_.push_back(doc.tokens().size());
            total_len += doc.tokens().size();

            std::unordered_map<std::string_view, std::uint32_t> counts;
            for (const auto& token : doc.tokens()) {
                ++counts[token];
            }
            for (const auto& [term, tf] : counts) {
                postings_[std::string(term)].push_back({position, tf});
            }
        }
        avgdl_ = static_cast<double>(total_len) / static_cast<double>(docs.size());
    }

    const Bm25Params& params() const noexcept { return params_; }
    std::size_t n_docs() const noexcept { return doc_ids_.size(); }
    double avgdl() const noexcept { return avgdl_; }
    const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }

    bool contains(std::string_view doc_id) const { return by_id_.contains(std::string(doc_id)); }

    std::size_t doc_length(std::string_view doc_id) const { return doc_len_[position_of(doc_id)]; }

    std::span<const Posting> postings(std::string_view term) const
    {
        auto it = postings_.find(std::string(term));
        if (it == postings_.end()) return {};
        return it->second;
    }

    std::size_t df(std::string_view term) const { return postings(term).size(); }

    std::size_t vocabulary_size() const noexcept { return postings_.size(); }

    /// BM25 score of one document. Repeated query terms count once.
    double score(std::span<const std::string> query_tokens, std::string_view doc_id) const
    {
        const std::uint32_t target = position_of(doc_id);
        double total = 0.0;
        for (const auto& term : distinct(query_tokens)) {
            auto list = postings(term);
            auto it = std::find_if(list.begin(), list.end(), [&](const Posting& p) { return p.doc == target; });
            if (it != list.end()) {
                total += term_weight(list.size(), it->tf, target);
            }
        }
        return total;
    }

    /// Top-k documents with positive score, best first, ties by doc id.
    std::vector<ScoredDoc> retrieve(std::span<const std::string> query_tokens, std::size_t k) const
    {
        if (k == 0) {
            throw UsageError("retrieve requires k >= 1");
        }
        std::vector<double> acc(doc_ids_.size(), 0.0);
        // Terms are accumulated in query order for every document, so each
        // sum matches score() bit for bit regardless of corpus order.
        for (const auto& term : distinct(query_tokens)) {
            auto list = postings(term);
            for (const auto& p : list) {
                acc[p.doc] += term_weight(list.size(), p.tf, p.doc);
            }
        }
        std::vector<ScoredDoc> hits;
        for (std::size_t i = 0; i < acc.size(); ++i) {
            if (acc[i] > 0.0) {
                hits.push_back({doc_ids_[i], acc[i]});
            }
        }
        auto better = [](const ScoredDoc& a, const ScoredDoc& b) {
            return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
        };
        if (hits.size() > k) {
            std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), better);
            hits.resize(k);
        } else {
            std::sort(hits.begin(), hits.end(), better);
        }
        return hits;
    }

private:
    std::uint32_t position_of(std::string_view doc_id) const
    {
        auto it = by_id_.find(std::string(doc_id));
        if (it == by_id_.end()) {
            throw UsageError("unknown document id '" + std::string(doc_id) + "'");
        }
        return it->second;
    }

    double term_weight(std::size_t df, std::uint32_t tf, std::uint32_t doc) const
    {
        const double f = tf;
        const double norm = 1.0 - params_.b + params_.b * static_cast<double>(doc_len_[doc]) / avgdl_;
        return bm25_idf(df, n_docs()) * f * (params_.k1 + 1.0) / (f + params_.k1 * norm);
    }

    static std::vector<std::string_view> distinct(std::span<const std::string> tokens)
    {
        std::vector<std::string_view> out;
        std::unordered_set<std::string_view> seen;
        for (const auto& t : tokens) {
            if (seen.insert(t).second) out.push_back(t);
        }
        return out;
    }

    Bm25Params params_;
    std::vector<std::string> doc_ids_;
    std::vector<std::size_t> doc_len_;
    std::unordered_map<std::string, std::uint32_t> by_id_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    double avgdl_ = 0.0;
};

}  // namespace clir
