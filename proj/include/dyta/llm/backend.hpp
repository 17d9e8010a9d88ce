#pragma once

#include "dyta/llm/types.hpp"

#include <string>
#include <variant>

namespace dyta::llm {

enum class FailureKind {
    transient, // timeout, 429, 5xx: worth retrying
    auth,      // rejected credential: configuration problem
    fatal,     // anything else
};

struct BackendFailure {
    FailureKind kind = FailureKind::fatal;
    int status = 0;
    std::string message;
};

struct BackendReply {
    std::string content;
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

using BackendResult = std::variant<BackendReply, BackendFailure>;

class Backend {
public:
    virtual ~Backend() = default;
    [[nodiscard]] virtual std::string id() const = 0;
    /// One transport attempt; retries are the gateway's job.
    virtual BackendResult send(const ChatRequest& request) = 0;
};

} // namespace dyta::llm
