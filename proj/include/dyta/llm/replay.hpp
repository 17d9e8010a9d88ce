#pragma once

#include "dyta/llm/backend.hpp"
#include "dyta/llm/ledger.hpp"

#include <unordered_map>

namespace dyta::llm {

/// Serves replies recorded in a ledger file, keyed by request digest.
class ReplayBackend final : public Backend {
public:
    explicit ReplayBackend(const std::vector<LedgerEntry>& entries)
    {
        for (const auto& e : entries) {
            if (!e.error) {
                replies_.emplace(e.request_digest, e.response_content);
            }
        }
    }
    explicit ReplayBackend(const std::filesystem::path& file) : ReplayBackend(read_ledger(file)) {}

    [[nodiscard]] std::string id() const override { return "replay"; }

    BackendResult send(const ChatRequest& request) override
    {
        const auto it = replies_.find(request_digest(request));
        if (it == replies_.end()) {
            return BackendFailure{FailureKind::fatal, 0, "request '" + request.tag + "' not present in replay ledger"};
        }
        return BackendReply{it->second};
    }

    [[nodiscard]] std::size_t size() const { return replies_.size(); }

private:
    std::unordered_map<std::string, std::string> replies_;
};

} // namespace dyta::llm
