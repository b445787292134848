#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "tokenize.hpp"

namespace clir {

/// One entry of a user profile: a past headline, article or tweet.
class Document {
public:
    Document(std::string id, std::optional<std::string> title, std::string body)
        : id_(std::move(id)), title_(std::move(title)), body_(std::move(body))
    {
        if (id_.empty()) {
            throw UsageError("document id must be nonempty");
        }
        if (title_) {
            tokens_ = tokenize(*title_);
            auto rest = tokenize(body_);
            tokens_.insert(tokens_.end(), rest.begin(), rest.end());
        } else {
            tokens_ = tokenize(body_);
        }
    }

    const std::string& id() const noexcept { return id_; }
    const std::optional<std::string>& title() const noexcept { return title_; }
    const std::string& body() const noexcept { return body_; }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    /// Text shown to the language model: the title when present, else the body.
    const std::string& display_text() const noexcept { return title_ ? *title_ : body_; }

    friend bool operator==(const Document& a, const Document& b)
    {
        return a.id_ == b.id_ && a.title_ == b.title_ && a.body_ == b.body_;
    }

private:
    std::string id_;
    std::optional<std::string> title_;
    std::string body_;
    std::vector<std::string> tokens_;
};

struct UserProfile {
    std::string user_id;
    std::vector<Document> documents;

    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

struct Sample {
    std::string id;
    std::string input_text;
    UserProfile profile;
    std::string reference_output;

    friend bool operator==(const Sample&, const Sample&) = default;
};

enum class Task { news_headline, tweet_paraphrase };

inline std::string_view to_string(Task task)
{
    return task == Task::news_headline ? "news" : "tweet";
}

inline Task parse_task(std::string_view name)
{
    if (name == "news" || name == "news_headline") return Task::news_headline;
    if (name == "tweet" || name == "tweet_paraphrase") return Task::tweet_paraphrase;
    throw UsageError("unknown task '" + std::string(name) + "' (expected news or tweet)");
}

struct Dataset {
    Task task = Task::news_headline;
    std::vector<Sample> samples;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Names of the JSON fields holding each logical value. `profile_title` may
/// be empty, in which case profile entries have no title.
struct FieldMap {
    std::string id = "id";
    std::string input = "input";
    std::string profile = "profile";
    std::string profile_id = "id";
    std::string profile_text = "text";
    std::string profile_title;
    std::string output = "output";

    /// LaMP news headline layout: profile entries carry "title" and "text".
    static FieldMap news()
    {
        FieldMap map;
        map.profile_title = "title";
        return map;
    }

    static FieldMap tweets() { return FieldMap{}; }

    static FieldMap for_task(Task task) { return task == Task::news_headline ? news() : tweets(); }
};

namespace detail {

    inline std::string read_file(const std::filesystem::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw IoError("cannot open " + path.string());
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    /// Parses JSON, translating byte offsets in parser errors into line:column.
    inline nlohmann::json parse_json(const std::string& text, const std::string& origin)
    {
        try {
            return nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
            std::size_t line = 1 + static_cast<std::size_t>(
                std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
            std::size_t line_start = text.rfind('\n', offset == 0 ? 0 : offset - 1);
            line_start = line_start == std::string::npos ? 0 : line_start + 1;
            std::size_t column = offset - line_start + 1;
            std::size_t line_end = text.find('\n', line_start);
            std::string context = text.substr(line_start, line_end == std::string::npos ? std::string::npos
                                                                                         : line_end - line_start);
            if (context.size() > 80) context = context.substr(0, 80) + "...";
            throw ParseError(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + e.what() +
                             " near: " + context);
        }
    }

    inline std::string record_label(const nlohmann::json& record, const FieldMap& fields)
    {
        auto it = record.find(fields.id);
        if (it != record.end() && it->is_string()) return "'" + it->get<std::string>() + "'";
        if (it != record.end() && it->is_number_integer()) return "'" + std::to_string(it->get<long long>()) + "'";
        return "<no id>";
    }

    /// Reads a string field; numeric ids are accepted and rendered as text.
    inline std::optional<std::string> string_field(const nlohmann::json& record, const std::string& name,
                                                   const std::string& where)
    {
        if (!record.is_object()) {
            throw SchemaError(where + ": expected a JSON object");
        }
        auto it = record.find(name);
        if (it == record.end() || it->is_null()) return std::nullopt;
        if (it->is_string()) return it->get<std::string>();
        if (it->is_number_integer()) return std::to_string(it->get<long long>());
        throw SchemaError(where + ": field '" + name + "' must be a string");
    }

    inline std::string required_field(const nlohmann::json& record, const std::string& name,
                                      const std::string& where)
    {
        auto value = string_field(record, name, where);
        if (!value) {
            throw SchemaError(where + ": missing field '" + name + "'");
        }
        return *value;
    }

    inline const nlohmann::json& records_array(const nlohmann::json& root, const std::string& origin)
    {
        if (root.is_array()) return root;
        // LaMP output files wrap their records as {"task": ..., "golds": [...]}.
        if (root.is_object()) {
            for (const char* key : {"golds", "samples", "data"}) {
                auto it = root.find(key);
                if (it != root.end() && it->is_array()) return *it;
            }
        }
        throw SchemaError(origin + ": expected a JSON array of records");
    }

}  // namespace detail

/// Loads a LaMP-style dataset. Reference outputs come from `outputs_path`
/// when given (an array of {id, output} or {"golds": [...]}) and otherwise
/// from an inline output field on each input record.
inline Dataset load_dataset(const std::filesystem::path& path, Task task, const FieldMap& fields,
                            const std::optional<std::filesystem::path>& outputs_path = std::nullopt)
{
    for (const auto* name : {&fields.id, &fields.input, &fields.profile, &fields.profile_id, &fields.profile_text,
                             &fields.output}) {
        if (name->empty()) {
            throw UsageError("field map leaves a required field unnamed");
        }
    }

    const std::string origin = path.string();
    const nlohmann::json root = detail::parse_json(detail::read_file(path), origin);
    const nlohmann::json& records = detail::records_array(root, origin);

    std::optional<std::unordered_map<std::string, std::string>> outputs;
    if (outputs_path) {
        const std::string out_origin = outputs_path->string();
        const nlohmann::json out_root = detail::parse_json(detail::read_file(*outputs_path), out_origin);
        outputs.emplace();
        for (const auto& record : detail::records_array(out_root, out_origin)) {
            std::string where = out_origin + " record " + detail::record_label(record, fields);
            std::string id = detail::required_field(record, fields.id, where);
            std::string text = detail::required_field(record, fields.output, where);
            if (!outputs->emplace(id, std::move(text)).second) {
                throw JoinError(out_origin + ": duplicate output id '" + id + "'");
            }
        }
    }

    Dataset dataset;
    dataset.task = task;
    dataset.samples.reserve(records.size());
    std::unordered_set<std::string> seen_ids;
    for (const auto& record : records) {
        std::string where = origin + " record " + detail::record_label(record, fields);
        Sample sample;
        sample.id = detail::required_field(record, fields.id, where);
        if (!seen_ids.insert(sample.id).second) {
            throw SchemaError(where + ": duplicate sample id");
        }
        sample.input_text = detail::required_field(record, fields.input, where);
        if (sample.input_text.empty()) {
            throw SchemaError(where + ": field '" + fields.input + "' is empty");
        }

        auto profile_it = record.find(fields.profile);
        if (profile_it == record.end()) {
            throw SchemaError(where + ": missing field '" + fields.profile + "'");
        }
        if (!profile_it->is_array()) {
            throw SchemaError(where + ": field '" + fields.profile + "' must be an array");
        }
        sample.profile.user_id = sample.id;
        std::unordered_set<std::string> doc_ids;
        for (const auto& entry : *profile_it) {
            std::string doc_where = where + " profile entry " + detail::record_label(entry, FieldMap{});
            std::string doc_id = detail::required_field(entry, fields.profile_id, doc_where);
            if (doc_id.empty()) {
                throw SchemaError(doc_where + ": empty document id");
            }
            if (!doc_ids.insert(doc_id).second) {
                throw SchemaError(doc_where + ": duplicate document id '" + doc_id + "'");
            }
            std::optional<std::string> title;
            if (!fields.profile_title.empty()) {
                title = detail::string_field(entry, fields.profile_title, doc_where);
            }
            std::string body = detail::required_field(entry, fields.profile_text, doc_where);
            sample.profile.documents.emplace_back(std::move(doc_id), std::move(title), std::move(body));
        }

        if (outputs) {
            auto it = outputs->find(sample.id);
            if (it == outputs->end()) {
                throw JoinError(where + ": no output record with this id");
            }
            sample.reference_output = it->second;
        } else {
            auto inline_output = detail::string_field(record, fields.output, where);
            if (!inline_output) {
                throw JoinError(where + ": no '" + fields.output + "' for this record");
            }
            sample.reference_output = std::move(*inline_output);
        }
        if (sample.reference_output.empty()) {
            throw SchemaError(where + ": reference output is empty");
        }
        dataset.samples.push_back(std::move(sample));
    }

    if (outputs && outputs->size() != dataset.samples.size()) {
        for (const auto& [id, text] : *outputs) {
            if (!seen_ids.contains(id)) {
                throw JoinError(origin + ": output id '" + id + "' has no input record");
            }
        }
    }
    return dataset;
}

/// Serializes a dataset with inline outputs using the given field names.
inline nlohmann::json to_json(const Dataset& dataset, const FieldMap& fields)
{
    nlohmann::json records = nlohmann::json::array();
    for (const auto& sample : dataset.samples) {
        nlohmann::json profile = nlohmann::json::array();
        for (const auto& doc : sample.profile.documents) {
            nlohmann::json entry;
            entry[fields.profile_id] = doc.id();
            if (doc.title() && !fields.profile_title.empty()) {
                entry[fields.profile_title] = *doc.title();
            }
            entry[fields.profile_text] = doc.body();
            profile.push_back(std::move(entry));
        }
        nlohmann::json record;
        record[fields.id] = sample.id;
        record[fields.input] = sample.input_text;
        record[fields.profile] = std::move(profile);
        record[fields.output] = sample.reference_output;
        records.push_back(std::move(record));
    }
    return records;
}

inline void save_dataset(const Dataset& dataset, const std::filesystem::path& path, const FieldMap& fields)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << to_json(dataset, fields).dump(2) << '\n';
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

/// Keeps tweet samples whose input has at least `min_words` tokens and whose
/// profile has at least `min_profile_docs` documents. Order is preserved.
inline Dataset filter_tweet_dataset(const Dataset& dataset, std::size_t min_words = 10,
                                    std::size_t min_profile_docs = 10)
{
    if (dataset.task != Task::tweet_paraphrase) {
        throw UsageError("filter_tweet_dataset requires a tweet paraphrasing dataset");
    }
    Dataset kept;
    kept.task = dataset.task;
    std::copy_if(dataset.samples.begin(), dataset.samples.end(), std::back_inserter(kept.samples),
                 [&](const Sample& s) {
                     return tokenize(s.input_text).size() >= min_words &&
                            s.profile.documents.size() >= min_profile_docs;
                 });
    return kept;
}

}  // namespace clir
