#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "error.hpp"

namespace clir {

struct RetryPolicy {
    int retries = 2;
    std::chrono::milliseconds initial_backoff{500};

    /// Calls `attempt` until it returns without throwing BackendError, at
    /// most retries + 1 times, doubling the pause between attempts.
    template <typename F>
    auto run(F&& attempt) const -> decltype(attempt())
    {
        auto pause = initial_backoff;
        for (int i = 0;; ++i) {
            try {
                return attempt();
            } catch (const BackendError&) {
                if (i >= retries) throw;
            }
            if (pause.count() > 0) {
                std::this_thread::sleep_for(pause);
                pause *= 2;
            }
        }
    }
};

/// Counting semaphore bounding concurrent in-flight requests.
class InflightLimit {
public:
    explicit InflightLimit(std::size_t limit) : available_(limit == 0 ? 1 : limit) {}

    class Slot {
    public:
        explicit Slot(InflightLimit& owner) : owner_(&owner) { owner_->acquire(); }
        Slot(const Slot&) = delete;
        Slot& operator=(const Slot&) = delete;
        ~Slot() { owner_->release(); }

    private:
        InflightLimit* owner_;
    };

    Slot enter() { return Slot(*this); }

private:
    void acquire()
    {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return available_ > 0; });
        --available_;
    }

    void release()
    {
        {
            std::lock_guard lock(mutex_);
            ++available_;
        }
        cv_.notify_one();
    }

    std::mutex mutex_;
    std::condition_variable cv_;
    std::size_t available_;
};

struct HttpOptions {
    std::chrono::milliseconds timeout{30'000};
    RetryPolicy retry;
    std::size_t max_inflight = 4;
};

/// POSTs JSON documents to endpoints under one base URL
/// ("http://host:port[/prefix]"). Safe for concurrent use.
class JsonEndpoint {
public:
    JsonEndpoint(const std::string& base_url, HttpOptions options)
        : options_(options), inflight_(options.max_inflight)
    {
        auto scheme_end = base_url.find("://");
        if (scheme_end == std::string::npos) {
            throw ConfigError("base url '" + base_url + "' must start with http://");
        }
        if (base_url.compare(0, scheme_end, "http") != 0) {
            throw ConfigError("unsupported scheme in '" + base_url + "' (only http is built in)");
        }
        auto path_start = base_url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            origin_ = base_url;
        } else {
            origin_ = base_url.substr(0, path_start);
            prefix_ = base_url.substr(path_start);
            while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
        }
        if (origin_.size() <= scheme_end + 3) {
            throw ConfigError("base url '" + base_url + "' has no host");
        }
    }

    const HttpOptions& options() const noexcept { return options_; }

    /// One request, no retries. Non-200 status, transport errors and
    /// unparsable bodies raise BackendError.
    nlohmann::json post_once(const std::string& path, const nlohmann::json& body) const
    {
        auto slot = inflight_.enter();
        httplib::Client client(origin_);
        auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
        auto micros = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - seconds);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());

        auto result = client.Post(prefix_ + path, body.dump(), "application/json");
        if (!result) {
            throw BackendError("POST " + prefix_ + path + ": " + httplib::to_string(result.error()));
        }
        if (result->status != 200) {
            throw BackendError("POST " + prefix_ + path + ": HTTP " + std::to_string(result->status));
        }
        auto parsed = nlohmann::json::parse(result->body, nullptr, false);
        if (parsed.is_discarded()) {
            throw BackendError("POST " + prefix_ + path + ": response is not JSON");
        }
        return parsed;
    }

    nlohmann::json post(const std::string& path, const nlohmann::json& body) const
    {
        return options_.retry.run([&] { return post_once(path, body); });
    }

private:
    HttpOptions options_;
    mutable InflightLimit inflight_;
    std::string origin_;
    std::string prefix_;
};

}  // namespace clir
