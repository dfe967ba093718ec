#pragma once

#include "prefclust/config.hpp"
#include "prefclust/errors.hpp"
#include "prefclust/geo.hpp"
#include "prefclust/tree.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <variant>
#include <vector>

namespace prefclust {

enum class MapStyle { OpenStreetMap, Terrain };

inline std::string to_string(MapStyle s) { return s == MapStyle::Terrain ? "terrain" : "openstreetmap"; }

inline MapStyle parse_map_style(std::string_view s) {
    if (s == "openstreetmap" || s == "osm") return MapStyle::OpenStreetMap;
    if (s == "terrain") return MapStyle::Terrain;
    throw ValidationError("map_style", "must be openstreetmap or terrain");
}

inline constexpr double kMaxRadiusKm = 50.0;
inline constexpr std::size_t kMaxPreferences = 30;
inline constexpr std::size_t kMaxLimitPerClass = 100;
inline constexpr std::size_t kDefaultLimitPerClass = 50;
/// Slack added to the radius when post-filtering provider results.
inline constexpr double kRadiusSlackKm = 0.1;

/// One user request: where, how far, and which classes in preference order.
struct QuerySpec {
    std::variant<std::string, GeoPoint> location;
    double radius_km = 0.0;
    std::vector<std::string> preferences;
    std::size_t limit_per_class = kDefaultLimitPerClass;
    MapStyle map_style = MapStyle::OpenStreetMap;

    /// Throws ValidationError naming the first offending field.
    void validate() const {
        if (const auto *place = std::get_if<std::string>(&location); place && place->empty())
            throw ValidationError("location", "must not be empty");
        if (!(radius_km > 0.0 && radius_km <= kMaxRadiusKm))
            throw ValidationError("radius_km", "must be in (0, 50]");
        if (preferences.empty() || preferences.size() > kMaxPreferences)
            throw ValidationError("preferences", "between 1 and 30 preferences required");
        for (std::size_t i = 0; i < preferences.size(); ++i) {
            if (preferences[i].empty()) throw ValidationError("preferences", "empty preference name");
            for (std::size_t j = 0; j < i; ++j)
                if (iequals(preferences[i], preferences[j]))
                    throw ValidationError("preferences", "duplicate preference '" + preferences[i] + "'");
        }
        if (limit_per_class < 1 || limit_per_class > kMaxLimitPerClass)
            throw ValidationError("limit_per_class", "must be in [1, 100]");
    }
};

struct Venue {
    std::string name;
    GeoPoint point = GeoPoint::make(0, 0);
    std::string category;
    std::string source_id;
};

/// Source of geocoding and category-scoped venue search.
///
/// Backends implement do_geocode/do_search; the public entry points enforce
/// preconditions and apply the radius post-filter and de-duplication, so every
/// backend obeys the same contract. Implementations must be safe to call from
/// several threads at once.
class PoiProvider {
public:
    virtual ~PoiProvider() = default;

    virtual std::string backend_name() const = 0;

    GeoPoint geocode(const std::string &place) const {
        if (place.empty()) throw ValidationError("location", "place name must not be empty");
        return do_geocode(place);
    }

    std::vector<Venue> search_venues(const GeoPoint &center, double radius_km, const std::string &category,
                                     std::size_t limit) const {
        if (!(radius_km > 0.0 && radius_km <= kMaxRadiusKm)) throw ValidationError("radius_km", "must be in (0, 50]");
        if (category.empty()) throw ValidationError("preferences", "empty category");
        std::vector<Venue> out;
        std::set<std::tuple<std::string, long long, long long>> seen;
        for (auto &v : do_search(center, radius_km, category, limit)) {
            if (out.size() >= limit) break;
            if (v.name.empty()) continue;
            if (haversine_km(center, v.point).value() > radius_km + kRadiusSlackKm) continue;
            const auto key = std::make_tuple(v.name, std::llround(v.point.lat() * 1e5), std::llround(v.point.lon() * 1e5));
            if (!seen.insert(key).second) continue;
            out.push_back(std::move(v));
        }
        return out;
    }

protected:
    virtual GeoPoint do_geocode(const std::string &place) const = 0;
    virtual std::vector<Venue> do_search(const GeoPoint &center, double radius_km, const std::string &category,
                                         std::size_t limit) const = 0;
};

/// One class per preference, in preference order. Classes with no venues
/// stay in the tree, empty.
inline PreferenceTree fetch_tree(const PoiProvider &provider, const QuerySpec &spec) {
    spec.validate();
    const GeoPoint center = std::holds_alternative<GeoPoint>(spec.location)
                                ? std::get<GeoPoint>(spec.location)
                                : provider.geocode(std::get<std::string>(spec.location));
    PreferenceTree tree;
    for (const auto &pref : spec.preferences) {
        const auto id = tree.add_class(pref);
        std::vector<Venue> venues;
        try {
            venues = provider.search_venues(center, spec.radius_km, pref, spec.limit_per_class);
        } catch (const ProviderError &e) {
            throw ProviderError(e.kind(), "class '" + pref + "': " + e.what());
        }
        for (const auto &v : venues) tree.add_node(id, v.name, v.point);
    }
    return tree;
}

/// File-name form of a place or category: lower case, spaces as '_'.
inline std::string fixture_slug(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == ' ') out.push_back('_');
        else out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

/// Offline backend over a directory of JSON files:
///   <place>.geocode.json             {"lat": ..., "lon": ...}
///   <place>.<category>.venues.json   {"venues": [{"id", "name", "lat", "lon"}]}
/// A search reads every place's file for the category (sorted by file name)
/// and relies on the radius post-filter to keep the nearby ones.
class FixtureProvider final : public PoiProvider {
public:
    explicit FixtureProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::string backend_name() const override { return "fixture"; }
    const std::filesystem::path &directory() const { return dir_; }

protected:
    GeoPoint do_geocode(const std::string &place) const override {
        const auto path = dir_ / (fixture_slug(place) + ".geocode.json");
        if (!std::filesystem::exists(path)) throw ProviderError(ProviderError::Kind::NotFound, "place not found: " + place);
        const auto doc = load(path);
        try {
            return GeoPoint::make(doc.at("lat").get<double>(), doc.at("lon").get<double>());
        } catch (const std::exception &e) {
            throw ProviderError(ProviderError::Kind::ProviderUnavailable, "bad fixture " + path.string() + ": " + e.what());
        }
    }

    std::vector<Venue> do_search(const GeoPoint &, double, const std::string &category, std::size_t) const override {
        if (!std::filesystem::is_directory(dir_))
            throw ProviderError(ProviderError::Kind::ProviderUnavailable, "fixture directory missing: " + dir_.string());
        const std::string suffix = "." + fixture_slug(category) + ".venues.json";
        std::vector<std::filesystem::path> files;
        for (const auto &entry : std::filesystem::directory_iterator(dir_)) {
            const auto name = entry.path().filename().string();
            if (name.size() > suffix.size() && name.ends_with(suffix) &&
                name.find('.') == name.size() - suffix.size())
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());

        std::vector<Venue> out;
        for (const auto &path : files) {
            const auto doc = load(path);
            try {
                for (const auto &v : doc.at("venues")) {
                    out.push_back(Venue{v.at("name").get<std::string>(),
                                        GeoPoint::make(v.at("lat").get<double>(), v.at("lon").get<double>()),
                                        category, v.value("id", std::string())});
                }
            } catch (const std::exception &e) {
                throw ProviderError(ProviderError::Kind::ProviderUnavailable,
                                    "bad fixture " + path.string() + ": " + e.what());
            }
        }
        return out;
    }

private:
    static nlohmann::json load(const std::filesystem::path &path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ProviderError(ProviderError::Kind::ProviderUnavailable, "cannot read " + path.string());
        try {
            return nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception &e) {
            throw ProviderError(ProviderError::Kind::ProviderUnavailable, "bad fixture " + path.string() + ": " + e.what());
        }
    }

    std::filesystem::path dir_;
};

namespace adapters {

// The only code that knows provider field names.

/// Nominatim-style search response: [{"lat": "22.57", "lon": "88.36", ...}].
inline std::optional<GeoPoint> parse_nominatim(const nlohmann::json &doc) {
    if (!doc.is_array() || doc.empty()) return std::nullopt;
    const auto &first = doc.front();
    auto number = [](const nlohmann::json &v) { return v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>(); };
    return GeoPoint::make(number(first.at("lat")), number(first.at("lon")));
}

/// Foursquare v2 venues/search response: response.venues[] with
/// id, name, location.lat, location.lng. Venues with bad coordinates are dropped.
inline std::vector<Venue> parse_foursquare_v2(const nlohmann::json &doc, const std::string &category) {
    std::vector<Venue> out;
    const auto &venues = doc.at("response").at("venues");
    for (const auto &v : venues) {
        if (!v.contains("location") || !v.contains("name")) continue;
        const auto &loc = v["location"];
        if (!loc.contains("lat") || !loc.contains("lng")) continue;
        try {
            out.push_back(Venue{v["name"].get<std::string>(),
                                GeoPoint::make(loc["lat"].get<double>(), loc["lng"].get<double>()), category,
                                v.value("id", std::string())});
        } catch (const OutOfRange &) {
        }
    }
    return out;
}

} // namespace adapters

/// Retry schedule for transient failures: three retries after 0.5, 1 and 2 s.
struct RetryPolicy {
    std::vector<std::chrono::duration<double>> backoff{std::chrono::duration<double>(0.5),
                                                       std::chrono::duration<double>(1.0),
                                                       std::chrono::duration<double>(2.0)};
    std::function<void(std::chrono::duration<double>)> sleep = [](std::chrono::duration<double> d) {
        std::this_thread::sleep_for(d);
    };
};

struct LiveProviderOptions {
    std::string base_url = "https://api.foursquare.com";
    std::string geocoder_url = "https://nominatim.openstreetmap.org";
    Credentials credentials;
    std::chrono::seconds timeout{10};
    RetryPolicy retry;
};

/// HTTP backend: Nominatim-compatible geocoder plus Foursquare v2-compatible
/// venue search. Each request uses its own client, so instances can be shared
/// freely across threads.
class LiveProvider final : public PoiProvider {
public:
    explicit LiveProvider(LiveProviderOptions opt) : opt_(std::move(opt)) {}

    std::string backend_name() const override { return "live"; }
    bool has_credentials() const { return opt_.credentials.complete(); }

protected:
    GeoPoint do_geocode(const std::string &place) const override {
        const auto body = get(opt_.geocoder_url, "/search", {{"q", place}, {"format", "json"}, {"limit", "1"}});
        try {
            if (auto p = adapters::parse_nominatim(nlohmann::json::parse(body))) return *p;
        } catch (const std::exception &e) {
            throw ProviderError(ProviderError::Kind::ProviderUnavailable, std::string("bad geocoder response: ") + e.what());
        }
        throw ProviderError(ProviderError::Kind::NotFound, "place not found: " + place);
    }

    std::vector<Venue> do_search(const GeoPoint &center, double radius_km, const std::string &category,
                                 std::size_t limit) const override {
        if (!has_credentials())
            throw ProviderError(ProviderError::Kind::ProviderUnavailable,
                                "authentication: no provider credentials configured "
                                "(PREFCLUST_PROVIDER_ID/PREFCLUST_PROVIDER_SECRET)");
        std::ostringstream ll;
        ll.precision(9);
        ll << center.lat() << ',' << center.lon();
        const httplib::Params params{
            {"ll", ll.str()},
            {"radius", std::to_string(static_cast<long>(std::lround(radius_km * 1000.0)))},
            {"query", category},
            {"limit", std::to_string(limit)},
            {"intent", "browse"},
            {"client_id", opt_.credentials.client_id},
            {"client_secret", opt_.credentials.client_secret},
            {"v", "20190425"},
        };
        const auto body = get(opt_.base_url, "/v2/venues/search", params);
        try {
            return adapters::parse_foursquare_v2(nlohmann::json::parse(body), category);
        } catch (const std::exception &e) {
            throw ProviderError(ProviderError::Kind::ProviderUnavailable, std::string("bad venue response: ") + e.what());
        }
    }

private:
    // Splits "scheme://host[:port][/prefix]" into the client origin and path prefix.
    static std::pair<std::string, std::string> split_url(const std::string &url) {
        const auto scheme_end = url.find("://");
        const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
        const auto slash = url.find('/', host_start);
        if (slash == std::string::npos) return {url, ""};
        std::string prefix = url.substr(slash);
        while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
        return {url.substr(0, slash), prefix};
    }

    std::string get(const std::string &base, const std::string &path, const httplib::Params &params) const {
        using Kind = ProviderError::Kind;
        const auto [origin, prefix] = split_url(base);
        const httplib::Headers headers{{"User-Agent", "prefclust/0.1"}, {"Accept", "application/json"}};
        std::string last_error;

        for (std::size_t attempt = 0;; ++attempt) {
            const bool can_retry = attempt < opt_.retry.backoff.size();
            std::chrono::duration<double> wait = can_retry ? opt_.retry.backoff[attempt] : std::chrono::duration<double>(0);

            httplib::Client client(origin);
            client.set_connection_timeout(opt_.timeout);
            client.set_read_timeout(opt_.timeout);
            auto res = client.Get(prefix + path, params, headers);

            if (!res) {
                last_error = "request failed: " + httplib::to_string(res.error());
            } else if (res->status == 401 || res->status == 403) {
                throw ProviderError(Kind::ProviderUnavailable,
                                    "authentication rejected (HTTP " + std::to_string(res->status) + "): " + snippet(res->body));
            } else if (res->status == 429) {
                if (res->has_header("Retry-After")) {
                    try {
                        wait = std::chrono::duration<double>(std::stod(res->get_header_value("Retry-After")));
                    } catch (const std::exception &) {
                    }
                }
                if (!can_retry)
                    throw ProviderError(Kind::RateLimited, "rate limited (HTTP 429) after " + std::to_string(attempt) + " retries");
                opt_.retry.sleep(wait);
                continue;
            } else if (res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
            } else if (res->status == 404) {
                throw ProviderError(Kind::NotFound, "HTTP 404 from " + origin + prefix + path);
            } else if (res->status >= 400) {
                throw ProviderError(Kind::ProviderUnavailable, "HTTP " + std::to_string(res->status) + ": " + snippet(res->body));
            } else {
                return res->body;
            }

            if (!can_retry)
                throw ProviderError(Kind::ProviderUnavailable,
                                    "unavailable after " + std::to_string(attempt) + " retries: " + last_error);
            opt_.retry.sleep(wait);
        }
    }

    static std::string snippet(const std::string &body) { return body.size() > 200 ? body.substr(0, 200) + "..." : body; }

    LiveProviderOptions opt_;
};

} // namespace prefclust

namespace prefclust {

/// Builds the backend named by provider.backend ("fixture" or "live").
inline std::shared_ptr<PoiProvider> make_provider(const Config &config, const EnvLookup &env) {
    const auto backend = config.get("provider.backend");
    if (backend == "fixture") return std::make_shared<FixtureProvider>(config.get("provider.fixtures"));
    if (backend == "live") {
        LiveProviderOptions opt;
        opt.base_url = config.get("provider.base_url");
        opt.geocoder_url = config.get("provider.geocoder_url");
        opt.credentials = load_credentials(env);
        return std::make_shared<LiveProvider>(std::move(opt));
    }
    throw ValidationError("backend", "must be live or fixture, got '" + backend + "'");
}

} // namespace prefclust
