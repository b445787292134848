#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "corpus.hpp"
#include "error.hpp"
#include "http.hpp"

namespace clir {

/// Prompt text with exactly one {input} and one {examples} placeholder.
class PromptTemplate {
public:
    static constexpr std::string_view input_placeholder = "{input}";
    static constexpr std::string_view examples_placeholder = "{examples}";

    explicit PromptTemplate(std::string text) : text_(std::move(text))
    {
        for (auto placeholder : {input_placeholder, examples_placeholder}) {
            auto first = text_.find(placeholder);
            if (first == std::string::npos) {
                throw UsageError("prompt template lacks " + std::string(placeholder));
            }
            if (text_.find(placeholder, first + 1) != std::string::npos) {
                throw UsageError("prompt template repeats " + std::string(placeholder));
            }
        }
    }

    /// Reproduced character for character from the published news prompt.
    static PromptTemplate news()
    {
        return PromptTemplate(
            "rephrase the this news title \"{input}\" using user profile examples titles : {examples}. "
            "Just give me the rephared sentence");
    }

    static PromptTemplate tweets()
    {
        return PromptTemplate(
            "rephrase this tweet \"{input}\" using user profile examples tweets : {examples}. "
            "Just give me the rephrased sentence");
    }

    static PromptTemplate for_task(Task task) { return task == Task::news_headline ? news() : tweets(); }

    const std::string& text() const noexcept { return text_; }

    std::size_t input_pos() const { return text_.find(input_placeholder); }
    std::size_t examples_pos() const { return text_.find(examples_placeholder); }

private:
    std::string text_;
};

/// ["A" , "B"] -- display texts double-quoted, joined by " , ".
inline std::string format_examples(std::span<const Document> docs)
{
    std::string out = "[";
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i != 0) out += " , ";
        out += '"';
        out += docs[i].display_text();
        out += '"';
    }
    out += ']';
    return out;
}

inline std::string build_prompt(std::string_view input_text, std::span<const Document> docs,
                                const PromptTemplate& tmpl)
{
    if (docs.empty()) {
        throw UsageError("build_prompt requires at least one document");
    }
    if (input_text.empty()) {
        throw UsageError("build_prompt requires nonempty input text");
    }
    const std::string& t = tmpl.text();
    std::size_t in = tmpl.input_pos();
    std::size_t ex = tmpl.examples_pos();
    std::string examples = format_examples(docs);

    std::string out;
    auto emit = [&](std::size_t pos) {
        if (pos == in) {
            out.append(input_text);
            return PromptTemplate::input_placeholder.size();
        }
        out.append(examples);
        return PromptTemplate::examples_placeholder.size();
    };
    std::size_t first = std::min(in, ex);
    std::size_t second = std::max(in, ex);
    out.append(t, 0, first);
    std::size_t after_first = first + emit(first);
    out.append(t, after_first, second - after_first);
    std::size_t after_second = second + emit(second);
    out.append(t, after_second);
    return out;
}

/// Text generation backend. Failures raise BackendError.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string generate(std::string_view prompt, std::size_t max_tokens) const = 0;
};

/// Returns the {input} portion of a prompt rendered from `tmpl`, located by
/// the literal text that surrounds the placeholder in the template.
class EchoClient final : public LlmClient {
public:
    explicit EchoClient(PromptTemplate tmpl) : tmpl_(std::move(tmpl)) {}

    std::string generate(std::string_view prompt, std::size_t) const override
    {
        const std::string& t = tmpl_.text();
        std::size_t in = tmpl_.input_pos();
        std::size_t ex = tmpl_.examples_pos();
        std::size_t in_end = in + PromptTemplate::input_placeholder.size();

        std::size_t start = 0;
        std::size_t stop = 0;
        if (in < ex) {
            std::string_view lead(t.data(), in);
            std::string_view follow(t.data() + in_end, ex - in_end);
            if (!prompt.starts_with(lead)) throw BackendError("echo: prompt does not match its template");
            start = lead.size();
            stop = follow.empty() ? std::string_view::npos : prompt.find(follow, start);
        } else {
            std::string_view tail(t.data() + in_end, t.size() - in_end);
            std::size_t ex_end = ex + PromptTemplate::examples_placeholder.size();
            std::string_view between(t.data() + ex_end, in - ex_end);
            if (!prompt.ends_with(tail)) throw BackendError("echo: prompt does not match its template");
            stop = prompt.size() - tail.size();
            std::size_t mark = between.empty() ? std::string_view::npos : prompt.rfind(between, stop);
            start = mark == std::string_view::npos ? std::string_view::npos : mark + between.size();
        }
        if (start == std::string_view::npos || stop == std::string_view::npos || stop < start) {
            throw BackendError("echo: cannot locate the input text in the prompt");
        }
        return std::string(prompt.substr(start, stop - start));
    }

private:
    PromptTemplate tmpl_;
};

/// Remote generation service:
///   POST {base}/generate {"prompt", "max_tokens"} -> 200 {"text"}
/// One attempt per call; generate_output owns the retry policy.
class HttpLlmClient final : public LlmClient {
public:
    HttpLlmClient(const std::string& base_url, HttpOptions options) : endpoint_(base_url, options) {}

    std::string generate(std::string_view prompt, std::size_t max_tokens) const override
    {
        nlohmann::json body = {{"prompt", prompt}, {"max_tokens", max_tokens}};
        auto reply = endpoint_.post_once("/generate", body);
        auto it = reply.find("text");
        if (it == reply.end() || !it->is_string()) {
            throw BackendError("generation response lacks a 'text' string");
        }
        return it->get<std::string>();
    }

private:
    JsonEndpoint endpoint_;
};

/// Trims whitespace and strips one pair of enclosing double quotes.
inline std::string clean_generation(std::string_view text)
{
    constexpr std::string_view space = " \t\r\n\f\v";
    auto first = text.find_first_not_of(space);
    if (first == std::string_view::npos) return {};
    text = text.substr(first, text.find_last_not_of(space) - first + 1);
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
        text = text.substr(1, text.size() - 2);
    }
    return std::string(text);
}

inline std::string generate_output(const LlmClient& client, std::string_view prompt, std::size_t max_tokens,
                                   const RetryPolicy& retry = {})
{
    if (prompt.empty()) throw UsageError("generate_output requires a nonempty prompt");
    if (max_tokens < 1) throw UsageError("max_tokens must be >= 1");
    try {
        return clean_generation(retry.run([&] { return client.generate(prompt, max_tokens); }));
    } catch (const BackendError& e) {
        throw GenerationError(std::string("generation failed after retries: ") + e.what());
    }
}

inline std::shared_ptr<const LlmClient> make_llm(std::string_view spec, const PromptTemplate& tmpl,
                                                 HttpOptions options = {})
{
    if (spec == "echo") return std::make_shared<EchoClient>(tmpl);
    if (spec.starts_with("http:") && !spec.starts_with("http://")) {
        return std::make_shared<HttpLlmClient>(std::string(spec.substr(5)), options);
    }
    if (spec.starts_with("http://")) return std::make_shared<HttpLlmClient>(std::string(spec), options);
    throw ConfigError("unknown llm backend '" + std::string(spec) + "' (echo, http:<url>)");
}

}  // namespace clir
