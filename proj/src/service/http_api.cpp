#include "areacfd/service/http_api.hpp"

#include "areacfd/error.hpp"
#include "areacfd/service/json_io.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

namespace areacfd::service {

using nlohmann::json;

int http_status(const std::string& code) {
    if (code == "market.unknown_area" || code == "forecast.no_profile" || code == "service.not_found") {
        return 404;
    }
    return 400;
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    send_json(res, {{"error", {{"code", code}, {"message", message}}}}, status);
}

std::string required_param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) {
        throw Error("service.bad_request", fmt::format("missing query parameter '{}'", name));
    }
    return req.get_param_value(name);
}

json parse_body(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::exception& e) {
        throw Error("service.bad_request", fmt::format("request body is not valid JSON: {}", e.what()));
    }
}

// Fields the client may omit fall back to the job configuration.
forecast::ForecastOptions forecast_options(const JobConfig& config, const json& body) {
    auto o = config.forecast_options();
    try {
        if (body.contains("N")) {
            const auto n = body["N"].get<long long>();
            if (n < 1) {
                throw Error("forecast.bad_options", "N must be at least 1");
            }
            o.n_draws = static_cast<std::size_t>(n);
        }
        if (body.contains("seed")) {
            o.seed = body["seed"].get<std::uint64_t>();
        }
        if (body.contains("levels")) {
            o.levels = body["levels"].get<std::vector<double>>();
        }
        if (body.contains("noise")) {
            o.noise = body["noise"].get<bool>();
        }
        if (body.contains("include_draws")) {
            o.keep_draws = body["include_draws"].get<bool>();
        }
    } catch (const json::exception& e) {
        throw Error("service.bad_request", fmt::format("bad forecast request: {}", e.what()));
    }
    return o;
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            send_error(res, http_status(e.code()), e.code(), e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "service.internal", e.what());
        }
    };
}

}  // namespace

struct HttpService::Impl {
    Engine& engine;
    httplib::Server server;

    explicit Impl(Engine& e) : engine(e) { routes(); }

    void routes() {
        server.Get("/areas", guarded([this](const httplib::Request&, httplib::Response& res) {
                       send_json(res, areas_json(engine.panel()));
                   }));

        server.Get("/panel/summary", guarded([this](const httplib::Request&, httplib::Response& res) {
                       send_json(res, panel_summary(engine.panel(), engine.diagnostics().size()));
                   }));

        server.Get("/posteriors", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       std::optional<std::string> area;
                       std::optional<market::Horizon> horizon;
                       if (req.has_param("area")) {
                           area = req.get_param_value("area");
                       }
                       if (req.has_param("horizon")) {
                           horizon = market::parse_horizon(req.get_param_value("horizon"));
                       }
                       json out = json::array();
                       for (const auto& s : engine.posteriors_for(area, horizon)) {
                           out.push_back(to_json(s));
                       }
                       send_json(res, {{"posteriors", std::move(out)}});
                   }));

        server.Put(R"(/profiles/([A-Za-z0-9_]+))",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const std::string target = req.matches[1];
                       engine.panel().area(target);
                       auto body = parse_body(req);
                       if (!body.is_object()) {
                           throw Error("elicitation.bad_document", "profile must be a JSON object");
                       }
                       if (!body.contains("target")) {
                           body["target"] = target;
                       } else if (body["target"] != target) {
                           throw Error("elicitation.bad_document",
                                       fmt::format("document target does not match /profiles/{}", target));
                       }
                       const auto stored =
                           engine.profiles().put(elicitation::profile_from_json(body), engine.panel().areas());
                       send_json(res, {{"version", stored.version}, {"profile", elicitation::to_json(stored.profile)}});
                   }));

        server.Get(R"(/profiles/([A-Za-z0-9_]+))",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const std::string target = req.matches[1];
                       engine.panel().area(target);
                       const auto stored = engine.profiles().get(target);
                       if (!stored) {
                           throw Error("service.not_found", fmt::format("no profile stored for {}", target));
                       }
                       send_json(res, {{"version", stored->version}, {"profile", elicitation::to_json(stored->profile)}});
                   }));

        server.Post("/forecast", guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const auto body = parse_body(req);
                        if (!body.is_object() || !body.contains("target") || !body.contains("horizon") ||
                            !body["target"].is_string() || !body["horizon"].is_string()) {
                            throw Error("service.bad_request", "forecast request needs string fields target and horizon");
                        }
                        const auto options = forecast_options(engine.config(), body);
                        const auto result = engine.forecast(body["target"].get<std::string>(),
                                                            market::parse_horizon(body["horizon"].get<std::string>()),
                                                            options);
                        send_json(res, to_json(result, options.keep_draws ? engine.config().max_export_draws : 0));
                    }));

        server.Get("/backtest", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const auto area = required_param(req, "area");
                       const auto horizon = market::parse_horizon(required_param(req, "horizon"));
                       std::vector<market::Diagnostic> diagnostics;
                       const auto records =
                           engine.backtest(area, horizon, engine.config().forecast_options(), &diagnostics);
                       json out = json::array();
                       for (const auto& r : records) {
                           out.push_back(to_json(r));
                       }
                       json diag = json::array();
                       for (const auto& d : diagnostics) {
                           diag.push_back({{"code", d.code}, {"message", d.message}});
                       }
                       send_json(res, {{"records", std::move(out)}, {"diagnostics", std::move(diag)}});
                   }));
    }
};

HttpService::HttpService(Engine& engine) : impl_(std::make_unique<Impl>(engine)) {}
HttpService::~HttpService() = default;

bool HttpService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int HttpService::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool HttpService::listen_after_bind() { return impl_->server.listen_after_bind(); }
void HttpService::wait_until_ready() const { impl_->server.wait_until_ready(); }
void HttpService::stop() { impl_->server.stop(); }

}  // namespace areacfd::service
