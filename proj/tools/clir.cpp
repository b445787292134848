// clir: personalized retrieval + generation experiments over LaMP-style data.
//
//   clir run --dataset data.json --task news --mode tl --chain en-es-en \
//            --translator dict:maps.json --llm echo --out report.csv
//
// Every option may also be set in a TOML/INI config file under a [run]
// section (key = value, keys named after the long options), given by
// --config or the CLIR_CONFIG variable.
// Command-line values win over the file.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "clir/clir.hpp"

namespace {

enum Exit { ok = 0, startup_error = 1, io_error = 2 };

struct CliOptions {
    std::string dataset;
    std::string outputs;
    std::string task = "news";
    std::string mode = "tl";
    std::string chain = "en-es-en";
    std::string translator = "identity";
    std::string expander = "none";
    std::string llm = "echo";
    std::string template_path;
    std::string out;
    std::string profile_text;
    std::string profile_title;
    std::size_t top_k = 2;
    std::size_t max_iters = 3;
    double epsilon = 1e-9;
    double k1 = 1.5;
    double b = 0.75;
    std::size_t limit = 0;
    std::size_t max_tokens = 64;
    std::size_t similar_terms = 3;
    std::size_t prompt_docs = 0;
    std::size_t parallel = 1;
    std::size_t inflight = 4;
    double translator_timeout = 30.0;
    int translator_retries = 2;
    double llm_timeout = 60.0;
    int llm_retries = 2;
    std::size_t min_words = 0;
    std::size_t min_profile_docs = 0;
    bool filter = false;
    std::uint64_t seed = 0;
};

std::chrono::milliseconds seconds(double s) { return std::chrono::milliseconds(static_cast<long long>(s * 1000.0)); }

clir::ExperimentConfig to_config(const CliOptions& o, const CLI::App& run)
{
    clir::ExperimentConfig cfg;
    cfg.dataset = o.dataset;
    if (!o.outputs.empty()) cfg.outputs = o.outputs;
    cfg.task = clir::parse_task(o.task);
    if (!o.profile_text.empty() || run.count("--profile-title") > 0) {
        auto fields = clir::FieldMap::for_task(cfg.task);
        if (!o.profile_text.empty()) fields.profile_text = o.profile_text;
        if (run.count("--profile-title") > 0) fields.profile_title = o.profile_title;
        cfg.fields = fields;
    }
    cfg.mode = clir::parse_mode(o.mode);
    cfg.bm25 = {o.k1, o.b};
    cfg.refinement = {o.max_iters, o.epsilon, o.top_k};
    cfg.chain = o.chain;
    cfg.translator = o.translator;
    cfg.expander = o.expander;
    cfg.similar_terms = o.similar_terms;
    cfg.llm = o.llm;
    if (!o.template_path.empty()) cfg.template_path = o.template_path;
    cfg.max_tokens = o.max_tokens;
    cfg.prompt_doc_cap = o.prompt_docs;
    cfg.translator_http = {seconds(o.translator_timeout), {o.translator_retries, std::chrono::milliseconds{500}},
                           o.inflight};
    cfg.llm_http = {seconds(o.llm_timeout), {o.llm_retries, std::chrono::milliseconds{500}}, o.inflight};
    if (o.limit > 0) {
        cfg.limit = o.limit;
    } else if (cfg.translator.starts_with("http") && cfg.llm.starts_with("http")) {
        cfg.limit = 100;  // live-backend integration runs default to a 100-sample slice
    }
    if (o.filter || run.count("--min-words") > 0 || run.count("--min-profile-docs") > 0) {
        cfg.filter_min_words = run.count("--min-words") > 0 ? o.min_words : 10;
        cfg.filter_min_profile_docs = run.count("--min-profile-docs") > 0 ? o.min_profile_docs : 10;
    }
    cfg.out = o.out;
    cfg.parallel = o.parallel;
    cfg.seed = o.seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"clir: translation-expanded personalized retrieval experiments"};
    app.require_subcommand(1);

    CliOptions o;
    auto* run = app.add_subcommand("run", "run one experiment mode over a dataset and write a CSV report");
    // Config keys for the run subcommand live under a [run] section.
    app.set_config("--config", "", "key = value config file; command-line flags take precedence")
        ->envname("CLIR_CONFIG");
    run->add_option("--dataset", o.dataset, "LaMP-style input JSON")->required();
    run->add_option("--outputs", o.outputs, "separate gold outputs JSON (array or {\"golds\": [...]})");
    run->add_option("--task", o.task, "news | tweet")->check(CLI::IsMember({"news", "tweet"}));
    run->add_option("--mode", o.mode, "tl | bm25")->check(CLI::IsMember({"tl", "bm25"}));
    run->add_option("--chain", o.chain, "round-trip language chain, e.g. en-es-fr-en");
    run->add_option("--translator", o.translator, "identity | dict:<path> | http:<url>");
    run->add_option("--expander", o.expander, "none | table:<path>");
    run->add_option("--llm", o.llm, "echo | http:<url>");
    run->add_option("--template", o.template_path, "prompt template file with {input} and {examples}");
    run->add_option("--out", o.out, "CSV report path")->required();
    run->add_option("--profile-text", o.profile_text, "profile entry field holding the document body");
    run->add_option("--profile-title", o.profile_title, "profile entry field holding the title (empty for none)");
    run->add_option("--top-k", o.top_k, "documents per retrieval stage")->check(CLI::PositiveNumber);
    run->add_option("--max-iters", o.max_iters, "refinement rounds")->check(CLI::PositiveNumber);
    run->add_option("--epsilon", o.epsilon, "minimum score-sum improvement")->check(CLI::PositiveNumber);
    run->add_option("--k1", o.k1, "BM25 k1")->check(CLI::NonNegativeNumber);
    run->add_option("--b", o.b, "BM25 b")->check(CLI::Range(0.0, 1.0));
    run->add_option("--limit", o.limit, "evaluate at most n samples");
    run->add_option("--max-tokens", o.max_tokens, "generation length bound")->check(CLI::PositiveNumber);
    run->add_option("--similar-terms", o.similar_terms, "terms requested from the expander per query token");
    run->add_option("--prompt-docs", o.prompt_docs, "cap on documents placed in the prompt (0 = all)");
    run->add_option("--parallel", o.parallel, "samples processed concurrently")->check(CLI::PositiveNumber);
    run->add_option("--inflight", o.inflight, "concurrent requests per remote backend")->check(CLI::PositiveNumber);
    run->add_option("--translator-timeout", o.translator_timeout, "seconds");
    run->add_option("--translator-retries", o.translator_retries);
    run->add_option("--llm-timeout", o.llm_timeout, "seconds");
    run->add_option("--llm-retries", o.llm_retries);
    run->add_flag("--filter", o.filter, "keep tweets with >= 10 words from users with >= 10 profile tweets");
    run->add_option("--min-words", o.min_words, "tweet filter: minimum input words");
    run->add_option("--min-profile-docs", o.min_profile_docs, "tweet filter: minimum profile size");
    run->add_option("--seed", o.seed, "reserved for stochastic backends");

    if (const char* env = std::getenv("CLIR_CONFIG"); env && *env && !std::filesystem::exists(env)) {
        std::cerr << "clir: CLIR_CONFIG points to missing file '" << env << "'\n";
        return Exit::startup_error;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::startup_error;
    }

    clir::ExperimentConfig cfg;
    clir::ExperimentResult result;
    try {
        cfg = to_config(o, *run);
        cfg.validate();
        auto dataset = clir::load_experiment_dataset(cfg);
        auto backends = clir::make_backends(cfg);
        result = clir::run_experiment(dataset, cfg, backends);
    } catch (const clir::IoError& e) {
        std::cerr << "clir: " << e.what() << '\n';
        return Exit::io_error;
    } catch (const std::exception& e) {
        std::cerr << "clir: " << e.what() << '\n';
        return Exit::startup_error;
    }

    try {
        clir::emit_report(result, cfg.out);
    } catch (const std::exception& e) {
        std::cerr << "clir: " << e.what() << '\n';
        return Exit::io_error;
    }

    std::size_t failed = 0;
    for (const auto& row : result.rows) failed += row.warnings.empty() ? 0 : 1;
    std::cerr << "clir: " << result.rows.size() << " samples, mode " << clir::to_string(result.mode)
              << ", rouge1 f1 " << result.rouge1.f1 << ", rougeL f1 " << result.rougeL.f1 << " (" << failed
              << " with warnings) -> " << cfg.out.string() << '\n';
    return Exit::ok;
}
