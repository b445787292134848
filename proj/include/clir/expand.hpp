#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "bm25.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "tokenize.hpp"
#include "translate.hpp"

namespace clir {

/// Source of terms related to a query term (e.g. embedding neighbours).
/// Returns at most k nonempty lowercase tokens, deterministically.
class TermExpander {
public:
    virtual ~TermExpander() = default;
    virtual std::vector<std::string> similar_terms(std::string_view term, std::size_t k) const = 0;
};

/// Fixed lookup table {"term": ["similar", ...]} loaded from JSON.
class StaticTableExpander final : public TermExpander {
public:
    StaticTableExpander() = default;

    explicit StaticTableExpander(const nlohmann::json& table)
    {
        if (!table.is_object()) {
            throw SchemaError("expander table must be an object of term -> [terms]");
        }
        for (const auto& [term, list] : table.items()) {
            if (!list.is_array()) {
                throw SchemaError("expander entry '" + term + "' must be an array");
            }
            for (const auto& value : list) {
                if (!value.is_string()) {
                    throw SchemaError("expander entry '" + term + "' holds a non-string");
                }
                add(term, value.get<std::string>());
            }
        }
    }

    static StaticTableExpander from_file(const std::filesystem::path& path)
    {
        return StaticTableExpander(detail::parse_json(detail::read_file(path), path.string()));
    }

    void add(std::string_view term, std::string_view similar)
    {
        auto key = tokenize(term);
        if (key.size() != 1) {
            throw SchemaError("expander key '" + std::string(term) + "' must be a single word");
        }
        auto& list = table_[key.front()];
        for (auto& token : tokenize(similar)) {
            list.push_back(std::move(token));
        }
    }

    std::vector<std::string> similar_terms(std::string_view term, std::size_t k) const override
    {
        auto it = table_.find(std::string(term));
        if (it == table_.end()) return {};
        std::vector<std::string> out(it->second.begin(),
                                     it->second.begin() + static_cast<std::ptrdiff_t>(std::min(k, it->second.size())));
        return out;
    }

private:
    std::unordered_map<std::string, std::vector<std::string>> table_;
};

struct ExpandedQuery {
    std::string original_text;
    /// variant_texts[0] is the round-trip translation of original_text.
    std::vector<std::string> variant_texts;
    /// Original tokens first, then unseen tokens in first-seen order.
    std::vector<std::string> all_tokens;
    std::vector<std::string> warnings;
    bool translation_failed = false;
};

struct ExpansionOptions {
    const TermExpander* expander = nullptr;
    std::size_t similar_terms = 3;
};

namespace detail {

    class TokenUnion {
    public:
        void add(std::vector<std::string> tokens)
        {
            for (auto& t : tokens) {
                if (seen_.insert(t).second) out_.push_back(std::move(t));
            }
        }

        std::vector<std::string> take() { return std::move(out_); }

    private:
        std::unordered_set<std::string> seen_;
        std::vector<std::string> out_;
    };

    /// Builds an ExpandedQuery from an already-translated variant.
    inline ExpandedQuery assemble(std::string_view original, std::string variant, const ExpansionOptions& options)
    {
        ExpandedQuery q;
        q.original_text = std::string(original);
        auto original_tokens = tokenize(original);
        TokenUnion all;
        all.add(original_tokens);
        all.add(tokenize(variant));
        if (options.expander != nullptr) {
            for (const auto& token : original_tokens) {
                all.add(options.expander->similar_terms(token, options.similar_terms));
            }
        }
        q.variant_texts.push_back(std::move(variant));
        q.all_tokens = all.take();
        return q;
    }

}  // namespace detail

/// Expands a query with its round-trip translation and, when an expander is
/// configured, similar terms for each original token. A translation failure
/// falls back to the original text as the only variant and records a warning.
inline ExpandedQuery expand_query(std::string_view q_text, const Translator& translator,
                                  const TranslationChain& chain, const ExpansionOptions& options = {})
{
    if (q_text.empty()) {
        throw UsageError("expand_query requires nonempty text");
    }
    try {
        return detail::assemble(q_text, round_trip(translator, q_text, chain), options);
    } catch (const TranslationError& e) {
        auto q = detail::assemble(q_text, std::string(q_text), options);
        q.translation_failed = true;
        q.warnings.emplace_back(e.what());
        return q;
    }
}

/// Doc ids of `primary` in order, then those of `secondary` not yet seen.
inline std::vector<std::string> merge_retrievals(const std::vector<ScoredDoc>& primary,
                                                 const std::vector<ScoredDoc>& secondary)
{
    std::vector<std::string> merged;
    std::unordered_set<std::string_view> seen;
    for (const auto* list : {&primary, &secondary}) {
        for (const auto& doc : *list) {
            if (seen.insert(doc.doc_id).second) merged.push_back(doc.doc_id);
        }
    }
    return merged;
}

struct RefinementConfig {
    std::size_t max_iterations = 3;
    double epsilon = 1e-9;
    std::size_t top_k = 2;

    void validate() const
    {
        if (max_iterations < 1) throw UsageError("max_iterations must be >= 1");
        if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw UsageError("epsilon must be a finite value > 0");
        if (top_k < 1) throw UsageError("top_k must be >= 1");
    }
};

struct RefinementResult {
    std::vector<ScoredDoc> docs;
    /// Number of expansion-and-retrieval rounds performed.
    std::size_t iterations = 0;
    std::size_t best_iteration = 0;
    std::vector<double> metrics;
    std::vector<std::string> warnings;
};

inline double score_sum(const std::vector<ScoredDoc>& docs)
{
    double sum = 0.0;
    for (const auto& d : docs) sum += d.score;
    return sum;
}

/// Iterative refinement. Round 0 retrieves with expand_query(q_text); every
/// later round pushes the previous round's translated variant through one
/// more round trip, re-expands against the original text and retrieves
/// again. The loop stops once the sum of returned scores fails to beat the
/// previous round by more than epsilon, after max_iterations rounds, or on
/// a translation failure. The best round wins; ties go to the earliest.
inline RefinementResult refine_loop(const Bm25Index& index, std::string_view q_text, const Translator& translator,
                                    const TranslationChain& chain, const RefinementConfig& cfg,
                                    const ExpansionOptions& options = {})
{
    cfg.validate();
    RefinementResult result;
    double best_metric = 0.0;

    ExpandedQuery query = expand_query(q_text, translator, chain, options);
    for (std::size_t round = 0;; ++round) {
        result.warnings.insert(result.warnings.end(), query.warnings.begin(), query.warnings.end());
        auto docs = index.retrieve(query.all_tokens, cfg.top_k);
        double metric = score_sum(docs);
        result.metrics.push_back(metric);
        ++result.iterations;

        if (round == 0 || metric > best_metric) {
            best_metric = metric;
            result.best_iteration = round;
            result.docs = std::move(docs);
        }
        if (query.translation_failed || result.iterations >= cfg.max_iterations) break;
        if (round > 0 && !(metric > result.metrics[round - 1] + cfg.epsilon)) break;

        std::string deeper;
        try {
            deeper = round_trip(translator, query.variant_texts.front(), chain);
        } catch (const TranslationError& e) {
            result.warnings.emplace_back(e.what());
            break;
        }
        query = detail::assemble(q_text, std::move(deeper), options);
    }
    return result;
}

struct TlRetrieval {
    std::vector<std::string> doc_ids;
    std::vector<ScoredDoc> baseline;
    RefinementResult refinement;
};

/// Baseline top-k over the raw input, followed by any new documents found
/// through the translation-expanded refinement loop.
inline TlRetrieval retrieve_tl(const Sample& sample, const Bm25Index& index, const Translator& translator,
                               const TranslationChain& chain, const RefinementConfig& cfg,
                               const ExpansionOptions& options = {})
{
    TlRetrieval out;
    out.baseline = index.retrieve(tokenize(sample.input_text), cfg.top_k);
    out.refinement = refine_loop(index, sample.input_text, translator, chain, cfg, options);
    out.doc_ids = merge_retrievals(out.baseline, out.refinement.docs);
    return out;
}

inline std::shared_ptr<const TermExpander> make_expander(std::string_view spec)
{
    if (spec.empty() || spec == "none") return nullptr;
    if (spec.starts_with("table:")) {
        return std::make_shared<StaticTableExpander>(StaticTableExpander::from_file(std::string(spec.substr(6))));
    }
    throw ConfigError("unknown expander '" + std::string(spec) + "' (none, table:<path>)");
}

}  // namespace clir
