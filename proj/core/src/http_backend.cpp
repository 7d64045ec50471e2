#include "fflm/backend.hpp"

#include "fflm/error.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>

namespace fflm {

using json = nlohmann::json;

http_backend::http_backend(const std::string & base_url, int timeout_seconds)
    : base_url_(base_url), timeout_seconds_(timeout_seconds) {
    std::string rest = base_url;
    const auto scheme_pos = rest.find("://");
    std::string scheme = "http";
    if (scheme_pos != std::string::npos) {
        scheme = rest.substr(0, scheme_pos);
        rest = rest.substr(scheme_pos + 3);
    }
    if (scheme != "http") {
        fail(error_kind::config_error,
             "backend url scheme '" + scheme + "' not supported (plain http only)");
    }
    const auto slash = rest.find('/');
    std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
    path_prefix = slash == std::string::npos ? "" : rest.substr(slash);
    while (!path_prefix.empty() && path_prefix.back() == '/') {
        path_prefix.pop_back();
    }
    if (authority.empty()) {
        fail(error_kind::config_error, "backend url has no host: " + base_url);
    }
    host_ = "http://" + authority;

    if (const char * token = std::getenv("FFLM_BACKEND_TOKEN"); token && *token) {
        bearer_token_ = token;
    }
}

token_prob_series http_backend::score(const score_request & req) {
    httplib::Client client(host_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    client.set_write_timeout(timeout_seconds_, 0);

    httplib::Headers headers;
    if (!bearer_token_.empty()) {
        headers.emplace("Authorization", "Bearer " + bearer_token_);
    }

    const json body = {
        {"model", req.model_id},
        {"conditioning", req.conditioning},
        {"target", req.target},
    };

    auto res = client.Post(path_prefix + "/score", headers, body.dump(), "application/json");
    if (!res) {
        fail(error_kind::backend_unreachable,
             base_url_ + ": " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        fail(error_kind::backend_unreachable,
             base_url_ + ": HTTP " + std::to_string(res->status));
    }

    json parsed;
    try {
        parsed = json::parse(res->body);
    } catch (const json::exception & e) {
        fail(error_kind::protocol_violation, "malformed response body: " + std::string(e.what()));
    }

    if (!parsed.is_object() || !parsed.contains("model") || !parsed.contains("tokens") ||
        !parsed.contains("logprobs") || !parsed["model"].is_string() ||
        !parsed["tokens"].is_array() || !parsed["logprobs"].is_array()) {
        fail(error_kind::protocol_violation, "response missing model/tokens/logprobs fields");
    }

    token_prob_series series;
    for (const auto & t : parsed["tokens"]) {
        if (!t.is_string()) {
            fail(error_kind::protocol_violation, "non-string token in response");
        }
        series.tokens.push_back(t.get<std::string>());
    }
    for (const auto & lp : parsed["logprobs"]) {
        if (!lp.is_number()) {
            fail(error_kind::protocol_violation, "non-numeric logprob in response");
        }
        series.logprobs.push_back(lp.get<double>());
    }
    return series;
}

} // namespace fflm
