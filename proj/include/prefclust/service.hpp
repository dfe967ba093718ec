#pragma once

#include "prefclust/data_io.hpp"
#include "prefclust/engine.hpp"
#include "prefclust/errors.hpp"
#include "prefclust/map_render.hpp"
#include "prefclust/provider.hpp"
#include "prefclust/version.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace prefclust {

struct HttpReply {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// A parsed POST /api/cluster body: either a location-based query or an
/// inline tree, never both.
struct ClusterRequest {
    std::optional<QuerySpec> query;
    std::optional<PreferenceTree> tree;
    MapStyle map_style = MapStyle::OpenStreetMap;
};

namespace service_detail {

inline double number_field(const nlohmann::json &body, const char *field) {
    const auto &v = body.at(field);
    if (!v.is_number()) throw ValidationError(field, "must be a number");
    return v.get<double>();
}

} // namespace service_detail

/// Throws ValidationError for any field-level problem.
inline ClusterRequest parse_cluster_request(std::string_view text) {
    nlohmann::json body;
    try {
        body = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &) {
        throw ValidationError("body", "request body is not valid JSON");
    }
    if (!body.is_object()) throw ValidationError("body", "request body must be a JSON object");

    ClusterRequest req;
    if (body.contains("map_style")) {
        if (!body["map_style"].is_string()) throw ValidationError("map_style", "must be a string");
        req.map_style = parse_map_style(body["map_style"].get<std::string>());
    }
    if (body.contains("radius_km")) {
        const double r = service_detail::number_field(body, "radius_km");
        if (!(r > 0.0 && r <= kMaxRadiusKm)) throw ValidationError("radius_km", "must be in (0, 50]");
    }

    if (body.contains("tree")) {
        if (body.contains("location") || body.contains("preferences"))
            throw ValidationError("tree", "inline tree cannot be combined with location/preferences");
        try {
            req.tree = tree_from_json(body["tree"]);
        } catch (const ParseError &e) {
            throw ValidationError("tree", e.what());
        } catch (const ValidationError &e) {
            throw ValidationError("tree", e.what());
        }
        return req;
    }

    QuerySpec q;
    q.map_style = req.map_style;
    if (!body.contains("location")) throw ValidationError("location", "required (or supply an inline tree)");
    const auto &loc = body["location"];
    if (loc.is_string()) {
        q.location = loc.get<std::string>();
    } else if (loc.is_object() && loc.contains("lat") && loc.contains("lon") && loc["lat"].is_number() &&
               loc["lon"].is_number()) {
        try {
            q.location = GeoPoint::make(loc["lat"].get<double>(), loc["lon"].get<double>());
        } catch (const OutOfRange &e) {
            throw ValidationError("location", e.what());
        }
    } else {
        throw ValidationError("location", "must be a place name or {lat, lon}");
    }
    if (!body.contains("radius_km")) throw ValidationError("radius_km", "required");
    q.radius_km = body["radius_km"].get<double>();
    if (!body.contains("preferences") || !body["preferences"].is_array())
        throw ValidationError("preferences", "must be an array of category names");
    for (const auto &p : body["preferences"]) {
        if (!p.is_string()) throw ValidationError("preferences", "must be an array of category names");
        q.preferences.push_back(p.get<std::string>());
    }
    if (body.contains("limit_per_class")) {
        const auto &l = body["limit_per_class"];
        if (!l.is_number_integer() || l.get<long long>() < 1) throw ValidationError("limit_per_class", "must be in [1, 100]");
        q.limit_per_class = l.get<std::size_t>();
    }
    q.validate();
    req.query = std::move(q);
    return req;
}

inline HttpReply error_reply(int status, const std::string &code, const std::string &message,
                             const std::string &field = {}) {
    nlohmann::ordered_json err{{"code", code}, {"message", message}};
    if (!field.empty()) err["field"] = field;
    return HttpReply{status, "application/json", nlohmann::ordered_json{{"error", std::move(err)}}.dump() + "\n"};
}

struct ServiceOptions {
    std::filesystem::path ui_dir = "webui/dist";
    RenderOptions render;
    /// Set when the live backend has no credentials configured.
    bool credentials_warning = false;
};

/// Stateless JSON API around fetch -> cluster -> render. Every request is
/// recomputed from scratch; handlers are safe to run concurrently.
class ApiService {
public:
    ApiService(std::shared_ptr<const PoiProvider> provider, ServiceOptions opt)
        : provider_(std::move(provider)), opt_(std::move(opt)) {}

    HttpReply cluster(std::string_view body) const {
        try {
            const auto req = parse_cluster_request(body);
            nlohmann::ordered_json echo;
            PreferenceTree tree;
            if (req.tree) {
                tree = *req.tree;
                echo["source"] = "inline";
            } else {
                const auto &q = *req.query;
                const GeoPoint center = std::holds_alternative<GeoPoint>(q.location)
                                            ? std::get<GeoPoint>(q.location)
                                            : provider_->geocode(std::get<std::string>(q.location));
                QuerySpec resolved = q;
                resolved.location = center;
                tree = fetch_tree(*provider_, resolved);
                echo["source"] = provider_->backend_name();
                if (const auto *place = std::get_if<std::string>(&q.location)) echo["location"] = *place;
                echo["center"] = {{"lat", round_sig9(center.lat())}, {"lon", round_sig9(center.lon())}};
                echo["radius_km"] = q.radius_km;
                echo["preferences"] = q.preferences;
                echo["limit_per_class"] = q.limit_per_class;
            }
            echo["map_style"] = to_string(req.map_style);

            const auto result = jjcluster(tree);
            auto doc = result_to_json(result);
            doc["geojson"] = geojson_document(result, tree);
            doc["legend"] = legend_json(legend(tree, result));
            doc["query_echo"] = std::move(echo);
            return HttpReply{200, "application/json", doc.dump() + "\n"};
        } catch (const ValidationError &e) {
            return error_reply(400, e.code(), e.what(), e.field());
        } catch (const ProviderError &e) {
            return error_reply(e.kind() == ProviderError::Kind::NotFound ? 404 : 502, e.code(), e.what());
        } catch (const EmptyTree &e) {
            return error_reply(422, e.code(), e.what());
        } catch (const Error &e) {
            return error_reply(500, e.code(), e.what());
        }
    }

    HttpReply health() const {
        nlohmann::ordered_json doc{{"status", "ok"}, {"version", kVersion}, {"backend", provider_->backend_name()}};
        doc["credentials_warning"] = opt_.credentials_warning;
        return HttpReply{200, "application/json", doc.dump() + "\n"};
    }

    /// `rel` is the request path below /ui/ (may be empty).
    HttpReply ui(std::string_view rel) const {
        std::filesystem::path p;
        for (std::size_t start = 0; start <= rel.size();) {
            auto end = rel.find('/', start);
            if (end == std::string_view::npos) end = rel.size();
            const auto seg = rel.substr(start, end - start);
            if (seg == ".." || seg == "." || seg.find('\\') != std::string_view::npos)
                return error_reply(400, "BadPath", "path traversal rejected");
            if (!seg.empty()) p /= std::string(seg);
            start = end + 1;
        }
        if (!std::filesystem::is_regular_file(opt_.ui_dir / "index.html"))
            return error_reply(404, "NotFound", "webui not built: no index.html under " + opt_.ui_dir.string());
        if (p.empty() || rel.ends_with('/')) p /= "index.html";
        const auto file = opt_.ui_dir / p;
        std::ifstream in(file, std::ios::binary);
        if (!std::filesystem::is_regular_file(file) || !in)
            return error_reply(404, "NotFound", "no such asset: " + p.generic_string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return HttpReply{200, content_type_for(file.extension().string()), ss.str()};
    }

    /// Registers routes on `server`. When `log` is set it receives one line
    /// per request: method, path, status, milliseconds.
    void mount(httplib::Server &server, std::function<void(const std::string &)> log = {}) const {
        auto send = [](httplib::Response &res, const HttpReply &r) {
            res.status = r.status;
            res.set_content(r.body, r.content_type);
        };
        server.Post("/api/cluster", [this, send](const httplib::Request &req, httplib::Response &res) {
            send(res, cluster(req.body));
        });
        server.Get("/api/health", [this, send](const httplib::Request &, httplib::Response &res) { send(res, health()); });
        server.Get("/ui", [](const httplib::Request &, httplib::Response &res) { res.set_redirect("/ui/"); });
        server.Get(R"(/ui/(.*))", [this, send](const httplib::Request &req, httplib::Response &res) {
            send(res, ui(req.path.substr(4)));
        });
        if (log) {
            server.set_pre_routing_handler([](const httplib::Request &, httplib::Response &) {
                request_start() = std::chrono::steady_clock::now();
                return httplib::Server::HandlerResponse::Unhandled;
            });
            server.set_logger([log](const httplib::Request &req, const httplib::Response &res) {
                const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - request_start());
                std::ostringstream line;
                line.setf(std::ios::fixed);
                line.precision(1);
                line << req.method << ' ' << req.path << ' ' << res.status << ' ' << ms.count() << "ms";
                log(line.str());
            });
        }
    }

private:
    static std::chrono::steady_clock::time_point &request_start() {
        thread_local std::chrono::steady_clock::time_point t;
        return t;
    }

    static std::string content_type_for(const std::string &ext) {
        if (ext == ".html") return "text/html; charset=utf-8";
        if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
        if (ext == ".css") return "text/css; charset=utf-8";
        if (ext == ".json" || ext == ".map") return "application/json";
        if (ext == ".svg") return "image/svg+xml";
        if (ext == ".png") return "image/png";
        if (ext == ".ico") return "image/x-icon";
        if (ext == ".woff2") return "font/woff2";
        return "application/octet-stream";
    }

    std::shared_ptr<const PoiProvider> provider_;
    ServiceOptions opt_;
};

} // namespace prefclust
