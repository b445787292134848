#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "bm25.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "expand.hpp"
#include "http.hpp"
#include "prompt.hpp"
#include "rouge.hpp"
#include "tokenize.hpp"
#include "translate.hpp"

namespace clir {

enum class Mode { tl, bm25 };

inline std::string_view to_string(Mode mode) { return mode == Mode::tl ? "tl" : "bm25"; }

inline Mode parse_mode(std::string_view name)
{
    if (name == "tl") return Mode::tl;
    if (name == "bm25") return Mode::bm25;
    throw ConfigError("unknown mode '" + std::string(name) + "' (expected tl or bm25)");
}

struct ExperimentConfig {
    std::filesystem::path dataset;
    std::optional<std::filesystem::path> outputs;
    Task task = Task::news_headline;
    std::optional<FieldMap> fields;  // defaults to FieldMap::for_task(task)

    Mode mode = Mode::tl;
    Bm25Params bm25;
    RefinementConfig refinement;
    std::string chain = "en-es-en";
    std::string translator = "identity";
    std::string expander = "none";
    std::size_t similar_terms = 3;
    std::string llm = "echo";
    std::optional<std::filesystem::path> template_path;
    std::size_t max_tokens = 64;
    /// Upper bound on documents passed into the prompt; 0 means all retrieved.
    std::size_t prompt_doc_cap = 0;

    HttpOptions translator_http{std::chrono::milliseconds{30'000}, {}, 4};
    HttpOptions llm_http{std::chrono::milliseconds{60'000}, {}, 4};

    std::optional<std::size_t> limit;
    std::optional<std::size_t> filter_min_words;
    std::optional<std::size_t> filter_min_profile_docs;
    std::filesystem::path out;
    std::size_t parallel = 1;
    std::uint64_t seed = 0;  // reserved; every bundled backend is deterministic

    FieldMap field_map() const { return fields.value_or(FieldMap::for_task(task)); }

    void validate() const
    {
        auto require_file = [](const std::filesystem::path& p, std::string_view what) {
            if (!std::filesystem::is_regular_file(p)) {
                throw ConfigError(std::string(what) + " '" + p.string() + "' does not exist");
            }
        };
        require_file(dataset, "dataset");
        if (outputs) require_file(*outputs, "outputs file");
        if (template_path) require_file(*template_path, "template");
        try {
            bm25.validate();
            refinement.validate();
        } catch (const UsageError& e) {
            throw ConfigError(e.what());
        }
        if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
        if (parallel < 1) throw ConfigError("parallel must be >= 1");
        if (limit && *limit == 0) throw ConfigError("limit must be >= 1");
        if ((filter_min_words || filter_min_profile_docs) && task != Task::tweet_paraphrase) {
            throw ConfigError("tweet filtering applies only to the tweet task");
        }
        if (mode == Mode::tl) {
            try {
                parse_chain(chain);
            } catch (const ChainError& e) {
                throw ConfigError(std::string("chain: ") + e.what());
            }
        }
    }
};

struct Backends {
    PromptTemplate prompt = PromptTemplate::news();
    std::shared_ptr<const Translator> translator;
    std::shared_ptr<const TermExpander> expander;
    std::shared_ptr<const LlmClient> llm;
    std::optional<TranslationChain> chain;
};

inline Backends make_backends(const ExperimentConfig& cfg)
{
    Backends b;
    b.prompt = cfg.template_path ? PromptTemplate(detail::read_file(*cfg.template_path))
                                 : PromptTemplate::for_task(cfg.task);
    b.llm = make_llm(cfg.llm, b.prompt, cfg.llm_http);
    if (cfg.mode == Mode::tl) {
        b.chain = parse_chain(cfg.chain);
        b.translator = make_translator(cfg.translator, cfg.translator_http);
        b.expander = make_expander(cfg.expander);
    }
    return b;
}

struct ReportRow {
    std::string sample_id;
    Mode mode = Mode::tl;
    std::string generated_text;
    RougeScore rouge1;
    RougeScore rougeL;
    std::vector<std::string> retrieved_doc_ids;
    std::size_t iterations_used = 0;
    std::vector<std::string> warnings;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

/// Indexes the sample's profile, retrieves (baseline or translation
/// expanded), prompts the model and scores the output. Every failure is
/// recorded as a warning on the row; nothing propagates.
inline ReportRow run_sample(const Sample& sample, const ExperimentConfig& cfg, const Backends& backends)
{
    ReportRow row;
    row.sample_id = sample.id;
    row.mode = cfg.mode;
    const auto& docs = sample.profile.documents;

    try {
        std::optional<Bm25Index> index;
        try {
            index.emplace(docs, cfg.bm25);
        } catch (const UsageError& e) {
            row.warnings.push_back(std::string("index: ") + e.what());
        }

        if (index) {
            if (cfg.mode == Mode::bm25) {
                for (auto& hit : index->retrieve(tokenize(sample.input_text), cfg.refinement.top_k)) {
                    row.retrieved_doc_ids.push_back(std::move(hit.doc_id));
                }
            } else {
                ExpansionOptions expansion{backends.expander.get(), cfg.similar_terms};
                auto tl = retrieve_tl(sample, *index, *backends.translator, *backends.chain, cfg.refinement,
                                      expansion);
                row.retrieved_doc_ids = std::move(tl.doc_ids);
                row.iterations_used = tl.refinement.iterations;
                row.warnings.insert(row.warnings.end(), tl.refinement.warnings.begin(),
                                    tl.refinement.warnings.end());
            }
        }

        std::vector<Document> prompt_docs;
        for (const auto& id : row.retrieved_doc_ids) {
            auto it = std::find_if(docs.begin(), docs.end(), [&](const Document& d) { return d.id() == id; });
            prompt_docs.push_back(*it);
        }
        if (prompt_docs.empty() && !docs.empty()) {
            row.warnings.emplace_back("no document matched the query; prompting with leading profile documents");
            auto n = std::min(docs.size(), cfg.refinement.top_k);
            prompt_docs.assign(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(n));
        }
        if (cfg.prompt_doc_cap > 0 && prompt_docs.size() > cfg.prompt_doc_cap) {
            prompt_docs.erase(prompt_docs.begin() + static_cast<std::ptrdiff_t>(cfg.prompt_doc_cap), prompt_docs.end());
        }

        if (prompt_docs.empty()) {
            row.warnings.emplace_back("profile is empty; no prompt built");
        } else {
            auto prompt = build_prompt(sample.input_text, prompt_docs, backends.prompt);
            try {
                row.generated_text = generate_output(*backends.llm, prompt, cfg.max_tokens, cfg.llm_http.retry);
            } catch (const GenerationError& e) {
                row.warnings.emplace_back(e.what());
            }
        }
    } catch (const std::exception& e) {
        row.warnings.push_back(std::string("sample failed: ") + e.what());
    }

    auto hyp = tokenize(row.generated_text);
    auto ref = tokenize(sample.reference_output);
    row.rouge1 = rouge_1(hyp, ref);
    row.rougeL = rouge_l(hyp, ref);
    return row;
}

struct ExperimentResult {
    Mode mode = Mode::tl;
    std::vector<ReportRow> rows;
    RougeScore rouge1;
    RougeScore rougeL;
};

/// Runs every sample (up to cfg.limit, in file order) under cfg.parallel
/// workers, sorts rows by sample id and macro-averages both metrics.
inline ExperimentResult run_experiment(const Dataset& dataset, const ExperimentConfig& cfg, const Backends& backends)
{
    std::size_t n = dataset.samples.size();
    if (cfg.limit) n = std::min(n, *cfg.limit);
    if (n == 0) {
        throw ConfigError("dataset has no samples to evaluate");
    }

    ExperimentResult result;
    result.mode = cfg.mode;
    result.rows.resize(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            result.rows[i] = run_sample(dataset.samples[i], cfg, backends);
        }
    };
    std::size_t workers = std::min(cfg.parallel, n);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    std::stable_sort(result.rows.begin(), result.rows.end(),
                     [](const ReportRow& a, const ReportRow& b) { return a.sample_id < b.sample_id; });
    std::vector<RougeScore> r1;
    std::vector<RougeScore> rl;
    for (const auto& row : result.rows) {
        r1.push_back(row.rouge1);
        rl.push_back(row.rougeL);
    }
    result.rouge1 = aggregate(r1);
    result.rougeL = aggregate(rl);
    return result;
}

inline Dataset load_experiment_dataset(const ExperimentConfig& cfg)
{
    Dataset dataset = load_dataset(cfg.dataset, cfg.task, cfg.field_map(), cfg.outputs);
    if (cfg.filter_min_words || cfg.filter_min_profile_docs) {
        dataset = filter_tweet_dataset(dataset, cfg.filter_min_words.value_or(10),
                                       cfg.filter_min_profile_docs.value_or(10));
    }
    return dataset;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    Dataset dataset = load_experiment_dataset(cfg);
    return run_experiment(dataset, cfg, make_backends(cfg));
}

namespace detail {

    inline std::string csv_field(std::string_view text)
    {
        if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
        std::string out = "\"";
        for (char c : text) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
        return out;
    }

    /// Shortest decimal that round-trips, independent of locale.
    inline std::string format_number(double value)
    {
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
        return std::string(buf, end);
    }

    inline void append_scores(std::string& line, const RougeScore& r1, const RougeScore& rl)
    {
        for (double v : {r1.precision, r1.recall, r1.f1, rl.precision, rl.recall, rl.f1}) {
            line += ',';
            line += format_number(v);
        }
    }

}  // namespace detail

inline constexpr std::string_view report_header =
    "sample_id,mode,generated_text,r1_p,r1_r,r1_f1,rl_p,rl_r,rl_f1,retrieved_doc_ids,iterations_used,warnings";

/// CSV report: header, one line per row, then the AGGREGATE line. LF endings.
inline std::string render_report(const ExperimentResult& result)
{
    if (result.rows.empty()) {
        throw UsageError("cannot render a report without rows");
    }
    std::string out(report_header);
    out += '\n';
    for (const auto& row : result.rows) {
        std::string line = detail::csv_field(row.sample_id);
        line += ',';
        line += to_string(row.mode);
        line += ',';
        line += detail::csv_field(row.generated_text);
        detail::append_scores(line, row.rouge1, row.rougeL);
        line += ',';
        line += detail::csv_field(join(row.retrieved_doc_ids, ";"));
        line += ',';
        line += std::to_string(row.iterations_used);
        line += ',';
        line += detail::csv_field(join(row.warnings, ";"));
        out += line;
        out += '\n';
    }
    std::string agg = "AGGREGATE,";
    agg += to_string(result.mode);
    agg += ',';
    detail::append_scores(agg, result.rouge1, result.rougeL);
    agg += ",,,";
    out += agg;
    out += '\n';
    return out;
}

inline void emit_report(const ExperimentResult& result, const std::filesystem::path& path)
{
    std::string text = render_report(result);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write report to " + path.string());
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

}  // namespace clir
