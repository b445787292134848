#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "error.hpp"
#include "http.hpp"
#include "tokenize.hpp"

namespace clir {

/// Two-letter lowercase ISO 639-1 style language code.
class LangCode {
public:
    explicit LangCode(std::string_view code) : code_(code)
    {
        if (!valid(code)) {
            throw ChainError("malformed language code '" + std::string(code) + "'");
        }
    }

    static bool valid(std::string_view code)
    {
        return code.size() == 2 && code[0] >= 'a' && code[0] <= 'z' && code[1] >= 'a' && code[1] <= 'z';
    }

    const std::string& str() const noexcept { return code_; }

    friend bool operator==(const LangCode&, const LangCode&) = default;
    friend auto operator<=>(const LangCode&, const LangCode&) = default;

private:
    std::string code_;
};

/// Ordered language hops of a round trip, e.g. en-es-fr-en.
class TranslationChain {
public:
    explicit TranslationChain(std::vector<LangCode> hops) : hops_(std::move(hops))
    {
        if (hops_.size() < 3) {
            throw ChainError("a translation chain needs at least 3 hops");
        }
        if (hops_.front() != hops_.back()) {
            throw ChainError("a translation chain must end in its source language");
        }
        for (std::size_t i = 1; i < hops_.size(); ++i) {
            if (hops_[i] == hops_[i - 1]) {
                throw ChainError("consecutive hops repeat language '" + hops_[i].str() + "'");
            }
        }
    }

    const std::vector<LangCode>& hops() const noexcept { return hops_; }
    const LangCode& source() const noexcept { return hops_.front(); }

    std::string str() const
    {
        std::string out;
        for (const auto& hop : hops_) {
            if (!out.empty()) out += '-';
            out += hop.str();
        }
        return out;
    }

    friend bool operator==(const TranslationChain&, const TranslationChain&) = default;

private:
    std::vector<LangCode> hops_;
};

inline TranslationChain parse_chain(std::string_view spec)
{
    std::vector<LangCode> hops;
    std::size_t start = 0;
    while (true) {
        auto dash = spec.find('-', start);
        hops.emplace_back(spec.substr(start, dash == std::string_view::npos ? std::string_view::npos : dash - start));
        if (dash == std::string_view::npos) break;
        start = dash + 1;
    }
    return TranslationChain(std::move(hops));
}

/// Translation backend. Implementations are deterministic for a fixed
/// configuration and safe to call concurrently. Failures raise BackendError.
class Translator {
public:
    virtual ~Translator() = default;
    virtual std::string translate(std::string_view text, const LangCode& source, const LangCode& target) const = 0;
};

class IdentityTranslator final : public Translator {
public:
    std::string translate(std::string_view text, const LangCode&, const LangCode&) const override
    {
        return std::string(text);
    }
};

/// Word-by-word lookup per ordered language pair. Input is tokenized with
/// the shared tokenizer; unknown tokens pass through; output tokens are
/// joined by single spaces.
class DictionaryTranslator final : public Translator {
public:
    using WordMap = std::unordered_map<std::string, std::string>;

    DictionaryTranslator() = default;

    /// Keys are "src-tgt" pairs, e.g. {"en-es": {"gun": "arma"}}.
    explicit DictionaryTranslator(const nlohmann::json& maps)
    {
        if (!maps.is_object()) {
            throw SchemaError("dictionary must be an object keyed by language pair");
        }
        for (const auto& [pair, words] : maps.items()) {
            auto dash = pair.find('-');
            if (dash == std::string::npos || !LangCode::valid(pair.substr(0, dash)) ||
                !LangCode::valid(pair.substr(dash + 1))) {
                throw SchemaError("dictionary key '" + pair + "' is not a language pair like en-es");
            }
            if (!words.is_object()) {
                throw SchemaError("dictionary entry '" + pair + "' must map words to words");
            }
            for (const auto& [word, translation] : words.items()) {
                if (!translation.is_string()) {
                    throw SchemaError("dictionary entry '" + pair + "/" + word + "' must be a string");
                }
                add(LangCode(pair.substr(0, dash)), LangCode(pair.substr(dash + 1)), word,
                    translation.get<std::string>());
            }
        }
    }

    static DictionaryTranslator from_file(const std::filesystem::path& path)
    {
        return DictionaryTranslator(detail::parse_json(detail::read_file(path), path.string()));
    }

    /// Both sides are normalized with the shared tokenizer and must be a
    /// single token each, so lookups preserve token count.
    void add(const LangCode& source, const LangCode& target, std::string_view word, std::string_view translation)
    {
        auto from = tokenize(word);
        auto to = tokenize(translation);
        if (from.size() != 1 || to.size() != 1) {
            throw SchemaError("dictionary entry '" + std::string(word) + "' -> '" + std::string(translation) +
                              "' must map one word to one word");
        }
        maps_[{source.str(), target.str()}][from.front()] = to.front();
    }

    std::string translate(std::string_view text, const LangCode& source, const LangCode& target) const override
    {
        auto tokens = tokenize(text);
        auto it = maps_.find({source.str(), target.str()});
        if (it != maps_.end()) {
            for (auto& token : tokens) {
                auto hit = it->second.find(token);
                if (hit != it->second.end()) token = hit->second;
            }
        }
        return join(tokens, " ");
    }

private:
    std::map<std::pair<std::string, std::string>, WordMap> maps_;
};

/// Remote translation service:
///   POST {base}/translate {"text", "source", "target"} -> 200 {"translation"}
class HttpTranslator final : public Translator {
public:
    HttpTranslator(const std::string& base_url, HttpOptions options = {}) : endpoint_(base_url, options) {}

    std::string translate(std::string_view text, const LangCode& source, const LangCode& target) const override
    {
        nlohmann::json body = {{"text", text}, {"source", source.str()}, {"target", target.str()}};
        return endpoint_.options().retry.run([&] {
            auto reply = endpoint_.post_once("/translate", body);
            auto it = reply.find("translation");
            if (it == reply.end() || !it->is_string()) {
                throw BackendError("translation response lacks a 'translation' string");
            }
            return it->get<std::string>();
        });
    }

private:
    JsonEndpoint endpoint_;
};

/// Translates `text` across each consecutive hop pair of `chain` and returns
/// the final text in the source language.
inline std::string round_trip(const Translator& translator, std::string_view text, const TranslationChain& chain)
{
    if (text.empty()) {
        throw UsageError("round_trip requires nonempty text");
    }
    const auto& hops = chain.hops();
    std::string current(text);
    for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
        try {
            current = translator.translate(current, hops[i], hops[i + 1]);
        } catch (const std::exception& e) {
            throw TranslationError(i, e.what());
        }
        if (current.empty()) {
            throw TranslationError(i, "backend returned empty text for " + hops[i].str() + "->" + hops[i + 1].str());
        }
    }
    return current;
}

/// Builds a translator from a backend spec: "identity", "dict:<path>" or
/// "http:<url>" (the url itself may be written with or without the prefix).
inline std::shared_ptr<const Translator> make_translator(std::string_view spec, HttpOptions options = {})
{
    if (spec == "identity") {
        return std::make_shared<IdentityTranslator>();
    }
    if (spec.starts_with("dict:")) {
        return std::make_shared<DictionaryTranslator>(DictionaryTranslator::from_file(std::string(spec.substr(5))));
    }
    if (spec.starts_with("http:") && !spec.starts_with("http://")) {
        return std::make_shared<HttpTranslator>(std::string(spec.substr(5)), options);
    }
    if (spec.starts_with("http://")) {
        return std::make_shared<HttpTranslator>(std::string(spec), options);
    }
    throw ConfigError("unknown translator '" + std::string(spec) + "' (identity, dict:<path>, http:<url>)");
}

}  // namespace clir
