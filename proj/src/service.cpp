#include "iemo/service.hpp"

#include <stdexcept>
#include <thread>

#include <httplib.h>

#include "iemo/config.hpp"
#include "iemo/log.hpp"

namespace iemo {

using nlohmann::json;

struct SessionService::Impl {
    ServiceOptions options;
    SessionManager manager;
    httplib::Server server;
    std::thread thread;
    int port{-1};

    explicit Impl(ServiceOptions o) : options(std::move(o)), manager(options.root) { routes(); }

    static void send(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    template <class F>
    static httplib::Server::Handler guarded(F f) {
        return [f](const httplib::Request& req, httplib::Response& res) {
            try {
                f(req, res);
            } catch (const ServiceError& e) {
                send(res, e.status(), e.to_json());
            } catch (const ConfigError& e) {
                send(res, 422, {{"code", "invalid_config"}, {"message", e.what()}, {"field", e.field()}});
            } catch (const json::exception& e) {
                send(res, 400, {{"code", "bad_request"}, {"message", std::string("malformed JSON: ") + e.what()}});
            } catch (const std::exception& e) {
                send(res, 500, {{"code", "internal"}, {"message", e.what()}});
            }
        };
    }

    static json body_of(const httplib::Request& req) {
        if (req.body.empty()) throw ServiceError(400, "bad_request", "request body must be a JSON object");
        return json::parse(req.body);
    }

    void routes() {
        const std::string id = "/v1/sessions/([A-Za-z0-9_-]+)";
        server.Post("/v1/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const std::string sid = manager.create(body_of(req));
            send(res, 201, manager.state(sid));
        }));
        server.Get("/v1/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
            send(res, 200, {{"sessions", manager.list()}});
        }));
        server.Get(id, guarded([this](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, manager.state(req.matches[1]));
        }));
        server.Delete(id, guarded([this](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, manager.abort(req.matches[1]));
        }));
        server.Get(id + "/query", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, manager.query(req.matches[1]));
        }));
        server.Get(id + "/population", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, manager.population(req.matches[1]));
        }));
        server.Post(id + "/judgment", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const std::string sid = req.matches[1];
            const json body = body_of(req);
            if (!body.is_object()) throw ServiceError(422, "invalid_judgment", "expected an object");
            for (const auto& item : body.items())
                if (item.key() != "pair_index" && item.key() != "outcome")
                    throw ServiceError(422, "invalid_judgment", "unknown key", item.key());
            if (!body.contains("pair_index") || !body.at("pair_index").is_number_unsigned())
                throw ServiceError(422, "invalid_judgment", "pair_index must be a non-negative integer", "pair_index");
            if (!body.contains("outcome") || !body.at("outcome").is_string())
                throw ServiceError(422, "invalid_judgment", "outcome must be better, worse or indifferent", "outcome");
            manager.state(sid);  // 404 before validating the outcome
            const Outcome outcome = parse_outcome(body.at("outcome").get<std::string>());
            send(res, 200, manager.submit(sid, body.at("pair_index").get<std::size_t>(), outcome));
        }));
        if (options.static_dir && !server.set_mount_point("/", options.static_dir->string()))
            log::warning("static asset directory " + options.static_dir->string() + " not found");
    }
};

SessionService::SessionService(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

SessionService::~SessionService() { stop(); }

int SessionService::bind() {
    if (impl_->port >= 0) return impl_->port;
    if (impl_->options.port == 0) impl_->port = impl_->server.bind_to_any_port(impl_->options.host);
    else if (impl_->server.bind_to_port(impl_->options.host, impl_->options.port)) impl_->port = impl_->options.port;
    if (impl_->port < 0) throw std::runtime_error("cannot bind " + impl_->options.host + ":" + std::to_string(impl_->options.port));
    return impl_->port;
}

void SessionService::listen() {
    bind();
    impl_->server.listen_after_bind();
}

void SessionService::start() {
    bind();
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void SessionService::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

SessionManager& SessionService::manager() { return impl_->manager; }

}  // namespace iemo
