#pragma once

#include "prefclust/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace prefclust {

/// Reads an environment variable; returns nullptr when unset.
using EnvLookup = std::function<const char *(const char *)>;

inline EnvLookup process_env() {
    return [](const char *name) { return std::getenv(name); };
}

/// Flat key=value settings ("server.listen", "tiles.osm", ...).
///
/// Sources are layered by the caller in increasing precedence: defaults,
/// config file, environment, command-line flags.
class Config {
public:
    static Config defaults() {
        Config c;
        c.values_ = {
            {"provider.backend", "fixture"},
            {"provider.fixtures", "fixtures/provider"},
            {"provider.base_url", "https://api.foursquare.com"},
            {"provider.geocoder_url", "https://nominatim.openstreetmap.org"},
            {"server.listen", "127.0.0.1:8080"},
            {"server.ui_dir", "webui/dist"},
            {"tiles.osm", "https://tile.openstreetmap.org/{z}/{x}/{y}.png"},
            {"tiles.terrain", "https://tiles.stadiamaps.com/tiles/stamen_terrain/{z}/{x}/{y}.png"},
        };
        return c;
    }

    /// TOML-style text: `key = value` lines, `[section]` headers prefixing
    /// following keys with "section.", `#` comments, optional double quotes.
    void merge_text(std::string_view text) {
        std::istringstream in{std::string(text)};
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto body = trim(line);
            if (body.empty()) continue;
            if (body.front() == '[') {
                if (body.back() != ']')
                    throw ValidationError("config", "line " + std::to_string(lineno) + ": bad section header");
                section = std::string(trim(body.substr(1, body.size() - 2)));
                continue;
            }
            const auto eq = body.find('=');
            if (eq == std::string_view::npos)
                throw ValidationError("config", "line " + std::to_string(lineno) + ": expected key = value");
            std::string key(trim(body.substr(0, eq)));
            auto value = trim(body.substr(eq + 1));
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
                value = value.substr(1, value.size() - 2);
            if (!section.empty()) key = section + "." + key;
            values_[key] = std::string(value);
        }
    }

    void merge_file(const std::string &path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("IoError", "cannot read config file " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        merge_text(ss.str());
    }

    /// Every known key may be overridden by PREFCLUST_<KEY>, with dots as
    /// underscores and upper-cased (server.listen -> PREFCLUST_SERVER_LISTEN).
    void merge_env(const EnvLookup &env) {
        for (auto &[key, value] : values_) {
            if (const char *v = env(env_name(key).c_str()); v && *v) value = v;
        }
    }

    void set(const std::string &key, std::string value) { values_[key] = std::move(value); }

    std::string get(const std::string &key) const {
        const auto it = values_.find(key);
        return it == values_.end() ? std::string() : it->second;
    }

    static std::string env_name(std::string_view key) {
        std::string out = "PREFCLUST_";
        for (char c : key) out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        return out;
    }

private:
    static std::string_view trim(std::string_view s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) return {};
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    }

    std::map<std::string, std::string> values_;
};

struct Credentials {
    std::string client_id;
    std::string client_secret;

    bool complete() const { return !client_id.empty() && !client_secret.empty(); }
};

/// PREFCLUST_PROVIDER_ID / PREFCLUST_PROVIDER_SECRET, falling back to a
/// key=value file named by PREFCLUST_CREDENTIALS_FILE (keys client_id,
/// client_secret). Environment variables win over the file.
inline Credentials load_credentials(const EnvLookup &env) {
    Credentials c;
    if (const char *path = env("PREFCLUST_CREDENTIALS_FILE"); path && *path) {
        Config file;
        file.merge_file(path);
        c.client_id = file.get("client_id");
        c.client_secret = file.get("client_secret");
    }
    if (const char *id = env("PREFCLUST_PROVIDER_ID"); id && *id) c.client_id = id;
    if (const char *secret = env("PREFCLUST_PROVIDER_SECRET"); secret && *secret) c.client_secret = secret;
    return c;
}

} // namespace prefclust
