#include "lyrictk/chat_backend.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <thread>

#include <httplib.h>

namespace lyrictk {

using json = nlohmann::json;

std::string chat_request_digest(const std::vector<ChatMessage>& messages, double temperature) {
    // FNV-1a over role/content pairs plus the temperature; good enough to
    // tell scripted requests apart, not a cryptographic identity.
    std::uint64_t h = 1469598103934665603ULL;
    const auto mix = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    for (const auto& m : messages) {
        mix(m.role);
        mix("\x1f");
        mix(m.content);
        mix("\x1e");
    }
    char temp_buf[32];
    std::snprintf(temp_buf, sizeof temp_buf, "T%.4f", temperature);
    mix(temp_buf);
    char out[17];
    std::snprintf(out, sizeof out, "%016" PRIx64, h);
    return out;
}

TokenBucket::TokenBucket(double capacity, double requests_per_minute, Clock now)
    : capacity_(capacity),
      rate_per_minute_(requests_per_minute),
      tokens_(capacity),
      now_(now ? std::move(now) : [] { return std::chrono::steady_clock::now(); }),
      last_(now_()) {}

void TokenBucket::refill_locked() {
    const auto t = now_();
    const double minutes =
        std::chrono::duration_cast<std::chrono::duration<double, std::ratio<60>>>(t - last_).count();
    last_ = t;
    tokens_ = std::min(capacity_, tokens_ + minutes * rate_per_minute_);
}

bool TokenBucket::try_acquire() {
    std::lock_guard lock(mutex_);
    if (rate_per_minute_ <= 0.0) return true;
    refill_locked();
    if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return true;
    }
    return false;
}

void TokenBucket::acquire() {
    while (!try_acquire()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
}

HttpChatClient::HttpChatClient(std::string base_url, std::string api_key, RetryPolicy retry,
                               TokenBucket* limiter)
    : base_url_(std::move(base_url)),
      api_key_(std::move(api_key)),
      retry_(retry),
      limiter_(limiter) {}

std::string HttpChatClient::chat(const std::vector<ChatMessage>& messages, double temperature) {
    if (limiter_) limiter_->acquire();
    json body;
    body["messages"] = json::array();
    for (const auto& m : messages) {
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    }
    body["temperature"] = temperature;

    return with_retries(retry_, [&]() -> std::string {
        httplib::Client cli(base_url_);
        cli.set_connection_timeout(10, 0);
        cli.set_read_timeout(180, 0);
        httplib::Headers headers;
        if (!api_key_.empty()) {
            headers.emplace("Authorization", "Bearer " + api_key_);
        }
        auto res = cli.Post("/chat", headers, body.dump(), "application/json");
        if (!res) {
            throw TransportError("POST /chat: " + httplib::to_string(res.error()));
        }
        if (res->status >= 500) {
            throw TransportError("POST /chat: HTTP " + std::to_string(res->status));
        }
        if (res->status != 200) {
            throw InputError("POST /chat: HTTP " + std::to_string(res->status));
        }
        json reply;
        try {
            reply = json::parse(res->body);
        } catch (const json::parse_error&) {
            throw SchemaError("POST /chat: response is not JSON");
        }
        if (!reply.contains("content") || !reply["content"].is_string()) {
            throw SchemaError("POST /chat: missing 'content'");
        }
        return reply["content"].get<std::string>();
    });
}

ScriptedChatClient::ScriptedChatClient(const std::string& script_path) {
    std::ifstream in(script_path);
    if (!in) throw ConfigError("chat mock: cannot open " + script_path);
    try {
        script_ = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("chat mock: invalid JSON in " + script_path + ": " + e.what());
    }
}

std::string ScriptedChatClient::chat(const std::vector<ChatMessage>& messages, double temperature) {
    const std::string digest = chat_request_digest(messages, temperature);
    std::string all_content;
    for (const auto& m : messages) {
        all_content += m.content;
        all_content += '\n';
    }

    std::lock_guard lock(mutex_);
    digests_.push_back(digest);
    if (script_.contains("by_digest") && script_["by_digest"].contains(digest)) {
        return script_["by_digest"][digest].get<std::string>();
    }
    if (script_.contains("by_contains")) {
        // json objects iterate in sorted key order, so the first hit is stable.
        for (const auto& [needle, reply] : script_["by_contains"].items()) {
            if (all_content.find(needle) != std::string::npos) {
                return reply.get<std::string>();
            }
        }
    }
    if (script_.contains("sequence") && sequence_pos_ < script_["sequence"].size()) {
        return script_["sequence"][sequence_pos_++].get<std::string>();
    }
    if (script_.contains("default")) {
        return script_["default"].get<std::string>();
    }
    throw InputError("chat mock: no scripted reply (request digest " + digest + ")");
}

std::size_t ScriptedChatClient::call_count() const {
    std::lock_guard lock(mutex_);
    return digests_.size();
}

std::vector<std::string> ScriptedChatClient::digests() const {
    std::lock_guard lock(mutex_);
    return digests_;
}

}  // namespace lyrictk
