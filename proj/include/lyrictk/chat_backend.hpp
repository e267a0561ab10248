#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyrictk/backend_util.hpp"

namespace lyrictk {

struct ChatMessage {
    std::string role;  // "system" or "user"
    std::string content;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string chat(const std::vector<ChatMessage>& messages, double temperature) = 0;
};

// Test/oracle clients that judge candidates against a known reference
// implement this; batch drivers feed them the per-item reference before
// each call (which forces single-worker execution).
class ReferenceAwareChatBackend : public ChatBackend {
public:
    virtual void set_reference(const std::vector<std::string>& lines) = 0;
};

// Stable fingerprint of a chat request, used to key scripted replies.
std::string chat_request_digest(const std::vector<ChatMessage>& messages, double temperature);

// Token bucket for outbound chat traffic. requests_per_minute <= 0 means
// unthrottled. The clock is injectable so the refill arithmetic is testable.
class TokenBucket {
public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;
    TokenBucket(double capacity, double requests_per_minute, Clock now = nullptr);

    bool try_acquire();
    void acquire();  // blocks until a token is available

private:
    void refill_locked();

    double capacity_;
    double rate_per_minute_;
    double tokens_;
    Clock now_;
    std::chrono::steady_clock::time_point last_;
    std::mutex mutex_;
};

class HttpChatClient : public ChatBackend {
public:
    HttpChatClient(std::string base_url, std::string api_key, RetryPolicy retry = {},
                   TokenBucket* limiter = nullptr);
    std::string chat(const std::vector<ChatMessage>& messages, double temperature) override;

private:
    std::string base_url_;
    std::string api_key_;  // sent as a bearer header, never logged
    RetryPolicy retry_;
    TokenBucket* limiter_;
};

// Script-driven chat stand-in. Reply resolution order: exact request digest
// ("by_digest"), first substring hit over the concatenated message contents
// ("by_contains", keys in sorted order), next unconsumed "sequence" entry,
// then "default". No hit raises InputError carrying the digest so fixtures
// can be extended.
class ScriptedChatClient : public ChatBackend {
public:
    explicit ScriptedChatClient(const std::string& script_path);
    std::string chat(const std::vector<ChatMessage>& messages, double temperature) override;

    std::size_t call_count() const;
    std::vector<std::string> digests() const;

private:
    nlohmann::json script_;
    mutable std::mutex mutex_;
    std::size_t sequence_pos_ = 0;
    std::vector<std::string> digests_;
};

}  // namespace lyrictk
