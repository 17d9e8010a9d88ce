#pragma once

#include "dyta/dataset/types.hpp"
#include "dyta/error.hpp"
#include "dyta/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dyta::llm {

using data::ItemId;

enum class Role { system, user, assistant };

inline const char* to_string(Role role)
{
    switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
    }
    return "user";
}

struct Message {
    Role role = Role::user;
    std::string content;
};

/// Side-channel facts for the mock oracle. Never rendered into prompts and
/// never sent to a live endpoint.
struct OracleHints {
    std::vector<ItemId> page_order;
    std::optional<ItemId> ground_truth;
    std::optional<int> rating_hint;
};

struct ChatRequest {
    std::vector<Message> messages;
    double temperature = 0.1;
    double top_p = 0.9;
    std::string model_name = "gpt-4o-mini";
    int max_tokens = 512;
    std::string tag;
    OracleHints hints;

    void validate() const
    {
        if (messages.empty()) {
            throw ConfigError("chat request '" + tag + "' has no messages");
        }
        if (!(temperature >= 0.0 && temperature <= 2.0)) {
            throw ConfigError("temperature must lie in [0, 2]");
        }
        if (!(top_p > 0.0 && top_p <= 1.0)) {
            throw ConfigError("top_p must lie in (0, 1]");
        }
    }
};

struct ChatResponse {
    std::string content;
    std::string backend_id;
    std::int64_t latency_ms = 0;
    int attempt_count = 1;
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

/// Canonical JSON of everything that determines a reply.
inline nlohmann::json canonical_request(const ChatRequest& request)
{
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : request.messages) {
        msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    }
    nlohmann::json hints = {{"page_order", request.hints.page_order}};
    if (request.hints.ground_truth) {
        hints["ground_truth"] = *request.hints.ground_truth;
    }
    if (request.hints.rating_hint) {
        hints["rating_hint"] = *request.hints.rating_hint;
    }
    return {{"tag", request.tag},
            {"model", request.model_name},
            {"temperature", request.temperature},
            {"top_p", request.top_p},
            {"max_tokens", request.max_tokens},
            {"messages", msgs},
            {"hints", hints}};
}

inline std::string request_digest(const ChatRequest& request)
{
    const auto h = fnv1a64(canonical_request(request).dump());
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[(h >> (4 * (15 - i))) & 0xF];
    }
    return out;
}

} // namespace dyta::llm
