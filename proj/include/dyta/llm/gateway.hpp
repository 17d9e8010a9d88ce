#pragma once

#include "dyta/llm/backend.hpp"
#include "dyta/llm/ledger.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <functional>
#include <memory>
#include <semaphore>
#include <thread>

namespace dyta::llm {

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_backoff{500}; // doubles after every failed attempt
};

/// Single entry point for chat completions: retry with exponential backoff on
/// transient failures, an in-flight cap, and a call ledger.
class Gateway {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    Gateway(std::shared_ptr<Backend> backend, RetryPolicy retry = {}, int max_concurrency = 4,
            std::shared_ptr<Ledger> ledger = std::make_shared<Ledger>())
        : backend_(std::move(backend)),
          retry_(retry),
          ledger_(std::move(ledger)),
          slots_(std::max(1, max_concurrency)),
          sleep_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })
    {
        if (!backend_) {
            throw ConfigError("gateway requires a backend");
        }
        if (retry_.max_attempts < 1) {
            throw ConfigError("max_attempts must be at least 1");
        }
    }

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    void set_sleeper(Sleeper sleeper) { sleep_ = std::move(sleeper); }

    [[nodiscard]] Ledger& ledger() { return *ledger_; }
    [[nodiscard]] const Ledger& ledger() const { return *ledger_; }
    [[nodiscard]] std::shared_ptr<Ledger> shared_ledger() const { return ledger_; }
    [[nodiscard]] std::string backend_id() const { return backend_->id(); }

    ChatResponse complete(const ChatRequest& request)
    {
        request.validate();
        const auto digest = request_digest(request);
        const auto start = std::chrono::steady_clock::now();
        auto elapsed = [&] {
            return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
                .count();
        };

        BackendFailure last;
        auto backoff = retry_.base_backoff;
        for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
            BackendResult result = [&] {
                slots_.acquire();
                struct Release {
                    std::counting_semaphore<>& s;
                    ~Release() { s.release(); }
                } release{slots_};
                return backend_->send(request);
            }();

            if (auto* reply = std::get_if<BackendReply>(&result)) {
                ChatResponse response{reply->content, backend_->id(), elapsed(), attempt, reply->prompt_tokens,
                                      reply->completion_tokens};
                ledger_->append({request.tag, digest, reply->content, attempt, response.latency_ms, std::nullopt,
                                 reply->prompt_tokens, reply->completion_tokens});
                return response;
            }
            last = std::get<BackendFailure>(result);
            if (last.kind == FailureKind::auth) {
                ledger_->append({request.tag, digest, "", attempt, elapsed(), last.message});
                throw ConfigError("LLM backend rejected the credential (status " + std::to_string(last.status)
                                  + "): " + last.message);
            }
            if (last.kind == FailureKind::fatal) {
                ledger_->append({request.tag, digest, "", attempt, elapsed(), last.message});
                throw BackendError("LLM backend failure (status " + std::to_string(last.status) + "): " + last.message,
                                   last.status);
            }
            spdlog::debug("{}: transient failure (status {}) on attempt {}", request.tag, last.status, attempt);
            if (attempt < retry_.max_attempts) {
                sleep_(backoff);
                backoff *= 2;
            }
        }
        ledger_->append({request.tag, digest, "", retry_.max_attempts, elapsed(), last.message});
        throw BackendError("LLM retries exhausted after " + std::to_string(retry_.max_attempts)
                               + " attempts (last status " + std::to_string(last.status) + "): " + last.message,
                           last.status);
    }

private:
    std::shared_ptr<Backend> backend_;
    RetryPolicy retry_;
    std::shared_ptr<Ledger> ledger_;
    std::counting_semaphore<> slots_;
    Sleeper sleep_;
};

} // namespace dyta::llm
