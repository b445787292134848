#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "clir/clir.hpp"

namespace fixtures {

inline clir::Document doc(std::string id, std::string body) { return {std::move(id), std::nullopt, std::move(body)}; }

inline clir::Document titled(std::string id, std::string title, std::string body = "")
{
    return {std::move(id), std::move(title), std::move(body)};
}

inline std::vector<std::string> random_words(std::mt19937_64& rng, const std::vector<std::string>& vocab,
                                             std::size_t lo, std::size_t hi)
{
    std::uniform_int_distribution<std::size_t> len(lo, hi);
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    std::vector<std::string> out(len(rng));
    for (auto& w : out) w = vocab[pick(rng)];
    return out;
}

inline std::vector<std::string> synthetic_vocabulary(std::size_t size)
{
    static const char* syllables[] = {"ka", "lo", "mi", "ne", "ru", "sa", "ti", "vo", "ze", "pa"};
    std::vector<std::string> vocab;
    for (std::size_t i = 0; vocab.size() < size; ++i) {
        vocab.push_back(std::string(syllables[i % 10]) + syllables[(i / 10) % 10] + syllables[(i / 100) % 10]);
    }
    return vocab;
}

/// Random news-style dataset: each sample has 4-12 titled profile documents.
inline clir::Dataset synthetic_dataset(std::size_t samples, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    auto vocab = synthetic_vocabulary(60);
    std::uniform_int_distribution<std::size_t> profile_size(4, 12);
    clir::Dataset ds;
    ds.task = clir::Task::news_headline;
    for (std::size_t i = 0; i < samples; ++i) {
        clir::Sample s;
        s.id = "s" + std::to_string(1000 + i);
        s.input_text = clir::join(random_words(rng, vocab, 5, 12), " ");
        s.reference_output = clir::join(random_words(rng, vocab, 4, 10), " ");
        s.profile.user_id = "u" + std::to_string(i);
        std::size_t n = profile_size(rng);
        for (std::size_t d = 0; d < n; ++d) {
            s.profile.documents.push_back(titled("d" + std::to_string(d), clir::join(random_words(rng, vocab, 3, 9), " "),
                                                 clir::join(random_words(rng, vocab, 0, 6), " ")));
        }
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

/// Word pairs whose round trip through Spanish lands on a different English
/// word: en -> es -> en.
struct Synonym {
    const char* word;
    const char* spanish;
    const char* back;
};

inline const std::vector<Synonym>& synonyms()
{
    static const std::vector<Synonym> table = {
        {"gun", "arma", "weapon"},      {"car", "coche", "automobile"}, {"film", "pelicula", "movie"},
        {"doctor", "medico", "physician"}, {"house", "casa", "home"},   {"trip", "viaje", "journey"},
    };
    return table;
}

inline clir::DictionaryTranslator synonym_dictionary()
{
    clir::DictionaryTranslator dict;
    clir::LangCode en("en");
    clir::LangCode es("es");
    for (const auto& s : synonyms()) {
        dict.add(en, es, s.word, s.spanish);
        dict.add(es, en, s.spanish, s.back);
    }
    return dict;
}

struct SynonymFixture {
    clir::Dataset dataset;
    std::vector<std::string> reachable_only_by_translation;  // sample ids
    std::map<std::string, std::string> relevant_doc;         // sample id -> doc id
};

/// 20 samples. In the first six the relevant profile document shares no
/// word with the input and is reachable only through the translated synonym;
/// the rest have no dictionary coverage at all.
inline SynonymFixture synonym_fixture()
{
    SynonymFixture fx;
    fx.dataset.task = clir::Task::news_headline;
    const auto& table = synonyms();
    for (std::size_t i = 0; i < 20; ++i) {
        clir::Sample s;
        s.id = "syn" + std::to_string(100 + i);
        s.profile.user_id = "user" + std::to_string(i);
        if (i < table.size()) {
            std::string w = table[i].word;
            std::string back = table[i].back;
            s.input_text = "planning a " + w + " outing for the weekend";
            s.reference_output = "a " + back + " outing planned for the weekend";
            s.profile.documents = {
                titled("p1", "weekend market report"),
                titled("p2", "local planning board meeting"),
                titled("p3", back + " ownership"),
                titled("p4", "recipes for autumn soups"),
                titled("p5", "stock prices rally again"),
            };
            fx.reachable_only_by_translation.push_back(s.id);
            fx.relevant_doc[s.id] = "p3";
        } else {
            s.input_text = "quarterly earnings lift bank shares number " + std::to_string(i);
            s.reference_output = "bank shares rise on quarterly earnings";
            s.profile.documents = {
                titled("p1", "bank shares climb"),
                titled("p2", "earnings season preview"),
                titled("p3", "gardening tips for spring"),
                titled("p4", "election night coverage"),
            };
            fx.relevant_doc[s.id] = "p1";
        }
        fx.dataset.samples.push_back(std::move(s));
    }
    return fx;
}

/// Returns fresh pseudo-random words on every call; counts its calls.
class AdversarialTranslator final : public clir::Translator {
public:
    explicit AdversarialTranslator(std::uint64_t seed) : rng_(seed) {}

    std::string translate(std::string_view, const clir::LangCode&, const clir::LangCode&) const override
    {
        std::lock_guard lock(mutex_);
        ++calls_;
        static const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "range", "gun",
                                                       "weapon", "kit", "license", "zeta", "!!", "the"};
        std::uniform_int_distribution<int> len(0, 8);
        std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
        std::uniform_int_distribution<int> fail(0, 9);
        if (fail(rng_) == 0) throw clir::BackendError("adversarial failure");
        std::string out;
        int n = len(rng_);
        for (int i = 0; i < n; ++i) {
            if (!out.empty()) out += ' ';
            out += vocab[pick(rng_)];
        }
        return out;
    }

    std::size_t calls() const { return calls_; }

private:
    mutable std::mutex mutex_;
    mutable std::mt19937_64 rng_;
    mutable std::size_t calls_ = 0;
};

/// Fails the first `failures` calls, then answers with `reply`.
class FlakyLlm final : public clir::LlmClient {
public:
    FlakyLlm(int failures, std::string reply) : failures_(failures), reply_(std::move(reply)) {}

    std::string generate(std::string_view, std::size_t) const override
    {
        if (calls_++ < failures_) throw clir::BackendError("timed out");
        return reply_;
    }

    int calls() const { return calls_; }

private:
    int failures_;
    std::string reply_;
    mutable std::atomic<int> calls_{0};
};

/// Echoes, except that prompts containing `poison` always fail.
class PoisonedEcho final : public clir::LlmClient {
public:
    PoisonedEcho(clir::PromptTemplate tmpl, std::string poison) : echo_(std::move(tmpl)), poison_(std::move(poison)) {}

    std::string generate(std::string_view prompt, std::size_t max_tokens) const override
    {
        if (prompt.find(poison_) != std::string_view::npos) throw clir::BackendError("injected failure");
        return echo_.generate(prompt, max_tokens);
    }

private:
    clir::EchoClient echo_;
    std::string poison_;
};

/// In-process HTTP server on an ephemeral localhost port.
class LocalServer {
public:
    explicit LocalServer(const std::function<void(httplib::Server&)>& routes)
    {
        routes(server_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~LocalServer()
    {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

}  // namespace fixtures
