#pragma once

// Requires cpp-httplib; define CPPHTTPLIB_OPENSSL_SUPPORT (and link OpenSSL)
// before inclusion to reach https endpoints.

#include "dyta/llm/backend.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <string>

namespace dyta::llm {

struct OpenAIConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;
    int timeout_seconds = 60;
};

/// Reads the credential from DYTA_API_KEY.
inline std::string api_key_from_env()
{
    const char* key = std::getenv("DYTA_API_KEY");
    return key ? std::string(key) : std::string();
}

/// Splits "https://host:port/prefix" into the scheme+authority part httplib
/// wants and the path prefix chat/completions is appended to.
inline std::pair<std::string, std::string> split_base_url(const std::string& url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("llm.base_url must include a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? std::string() : url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    return {origin, prefix};
}

inline nlohmann::json chat_completion_body(const ChatRequest& request)
{
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    }
    return {{"model", request.model_name},
            {"messages", messages},
            {"temperature", request.temperature},
            {"top_p", request.top_p},
            {"max_tokens", request.max_tokens}};
}

/// OpenAI-compatible POST {base_url}/chat/completions.
class OpenAIBackend final : public Backend {
public:
    explicit OpenAIBackend(OpenAIConfig config) : config_(std::move(config))
    {
        if (config_.api_key.empty()) {
            throw ConfigError("live backend requires DYTA_API_KEY");
        }
        std::tie(origin_, prefix_) = split_base_url(config_.base_url);
    }

    [[nodiscard]] std::string id() const override { return "openai:" + origin_; }

    BackendResult send(const ChatRequest& request) override
    {
        httplib::Client client(origin_);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        client.set_read_timeout(config_.timeout_seconds, 0);
        client.set_write_timeout(config_.timeout_seconds, 0);
        const httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}};
        const auto res = client.Post(prefix_ + "/chat/completions", headers, chat_completion_body(request).dump(),
                                     "application/json");
        if (!res) {
            return BackendFailure{FailureKind::transient, 0, "transport error: " + httplib::to_string(res.error())};
        }
        if (res->status == 401 || res->status == 403) {
            return BackendFailure{FailureKind::auth, res->status, res->body};
        }
        if (res->status == 429 || res->status == 408 || res->status >= 500) {
            return BackendFailure{FailureKind::transient, res->status, res->body};
        }
        if (res->status != 200) {
            return BackendFailure{FailureKind::fatal, res->status, res->body};
        }
        try {
            const auto body = nlohmann::json::parse(res->body);
            BackendReply reply;
            const auto& content = body.at("choices").at(0).at("message").at("content");
            reply.content = content.is_null() ? std::string() : content.get<std::string>();
            if (body.contains("usage") && body["usage"].is_object()) {
                reply.prompt_tokens = body["usage"].value("prompt_tokens", 0);
                reply.completion_tokens = body["usage"].value("completion_tokens", 0);
            }
            return reply;
        } catch (const nlohmann::json::exception& e) {
            return BackendFailure{FailureKind::fatal, res->status, std::string("malformed response body: ") + e.what()};
        }
    }

private:
    OpenAIConfig config_;
    std::string origin_;
    std::string prefix_;
};

} // namespace dyta::llm
