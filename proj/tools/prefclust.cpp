// prefclust: cluster / fetch / serve front end.
//
// Exit codes: 0 ok, 1 I/O or bind failure, 2 validation, 3 provider error.

#include "prefclust/config.hpp"
#include "prefclust/data_io.hpp"
#include "prefclust/engine.hpp"
#include "prefclust/map_render.hpp"
#include "prefclust/provider.hpp"
#include "prefclust/service.hpp"
#include "prefclust/version.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace prefclust;

constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitProvider = 3;

struct ExitError {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string &message) { throw ExitError{code, message}; }

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(kExitIo, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush()) fail(kExitIo, "cannot write " + path);
}

Config load_config(const std::string &config_path) {
    Config config = Config::defaults();
    std::string path = config_path;
    if (path.empty())
        if (const char *env = std::getenv("PREFCLUST_CONFIG")) path = env;
    if (!path.empty()) {
        try {
            config.merge_file(path);
        } catch (const ValidationError &e) {
            fail(kExitValidation, e.what());
        } catch (const Error &e) {
            fail(kExitIo, e.what());
        }
    }
    config.merge_env(process_env());
    return config;
}

std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string matrix_table(const ClusterResult &result) {
    std::vector<std::vector<std::string>> rows{{"step", "name", "class", "D", "T", "k"}};
    for (const auto &r : result.matrix)
        rows.push_back({std::to_string(r.step), r.node.name, r.class_name, format_fixed(r.D), format_fixed(r.T),
                        r.k ? format_fixed(*r.k) : "-"});
    std::vector<std::size_t> width(6, 0);
    for (const auto &row : rows)
        for (std::size_t c = 0; c < 6; ++c) width[c] = std::max(width[c], row[c].size());

    std::string out;
    for (const auto &row : rows) {
        std::string line;
        for (std::size_t c = 0; c < 6; ++c) {
            const auto pad = std::string(width[c] - row[c].size(), ' ');
            // Text columns left-aligned, numbers right-aligned.
            const bool left = c == 1 || c == 2;
            line += left ? row[c] + pad : pad + row[c];
            if (c + 1 < 6) line += "  ";
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
    }
    return out;
}

struct ClusterArgs {
    std::string input, format, out, geojson, html, style = "osm", config;
};

int run_cluster(const ClusterArgs &args) {
    const Config config = load_config(args.config);
    const std::string text = read_file(args.input);
    std::string format = args.format;
    if (format.empty()) format = args.input.ends_with(".json") ? "json" : "csv";

    PreferenceTree tree;
    ClusterResult result;
    RenderOptions render;
    try {
        render.style = parse_map_style(args.style);
        if (format == "json") {
            std::vector<std::string> warnings;
            tree = parse_tree_json(text, &warnings);
            for (const auto &w : warnings) std::cerr << "warning: " << w << "\n";
        } else {
            tree = parse_tree_csv(text);
        }
        result = jjcluster(tree);
    } catch (const Error &e) {
        fail(kExitValidation, e.code() + ": " + e.what());
    }
    render.osm_tiles = config.get("tiles.osm");
    render.terrain_tiles = config.get("tiles.terrain");

    std::cout << matrix_table(result);
    if (!result.skipped_classes.empty()) {
        std::cout << "skipped empty classes:";
        for (const auto &s : result.skipped_classes) std::cout << ' ' << s;
        std::cout << "\n";
    }
    if (!args.out.empty()) write_file(args.out, serialize_result_json(result));
    if (!args.geojson.empty()) write_file(args.geojson, to_geojson(result, tree));
    if (!args.html.empty()) write_file(args.html, render_html(result, tree, render));
    return 0;
}

std::vector<std::string> split_prefs(const std::string &list) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
    }
    return out;
}

struct FetchArgs {
    std::string place, prefs, backend, fixtures, out, config;
    double radius_km = 0.0;
    std::size_t limit = kDefaultLimitPerClass;
};

int run_fetch(const FetchArgs &args) {
    Config config = load_config(args.config);
    if (!args.backend.empty()) config.set("provider.backend", args.backend);
    if (!args.fixtures.empty()) config.set("provider.fixtures", args.fixtures);

    QuerySpec spec;
    spec.location = args.place;
    spec.radius_km = args.radius_km;
    spec.preferences = split_prefs(args.prefs);
    spec.limit_per_class = args.limit;

    PreferenceTree tree;
    try {
        spec.validate();
        const auto provider = make_provider(config, process_env());
        tree = fetch_tree(*provider, spec);
    } catch (const ValidationError &e) {
        fail(kExitValidation, e.code() + ": " + e.what());
    } catch (const ProviderError &e) {
        fail(kExitProvider, e.code() + ": " + e.what());
    }
    for (const auto &c : tree.classes()) std::cout << c.name << ": " << c.nodes.size() << "\n";
    write_file(args.out, write_tree_csv(tree));
    return 0;
}

struct ServeArgs {
    std::string listen, backend, fixtures, ui_dir, config;
};

int run_serve(const ServeArgs &args) {
    Config config = load_config(args.config);
    if (!args.listen.empty()) config.set("server.listen", args.listen);
    if (!args.backend.empty()) config.set("provider.backend", args.backend);
    if (!args.fixtures.empty()) config.set("provider.fixtures", args.fixtures);
    if (!args.ui_dir.empty()) config.set("server.ui_dir", args.ui_dir);

    const auto listen = config.get("server.listen");
    const auto colon = listen.rfind(':');
    int port = 0;
    try {
        if (colon == std::string::npos) throw std::invalid_argument("missing port");
        port = std::stoi(listen.substr(colon + 1));
    } catch (const std::exception &) {
        fail(kExitValidation, "server.listen must be host:port, got '" + listen + "'");
    }
    const auto host = listen.substr(0, colon);

    std::shared_ptr<PoiProvider> provider;
    try {
        provider = make_provider(config, process_env());
    } catch (const Error &e) {
        fail(kExitValidation, e.code() + ": " + e.what());
    }

    ServiceOptions opt;
    opt.ui_dir = config.get("server.ui_dir");
    opt.render.osm_tiles = config.get("tiles.osm");
    opt.render.terrain_tiles = config.get("tiles.terrain");
    if (const auto *live = dynamic_cast<const LiveProvider *>(provider.get()))
        opt.credentials_warning = !live->has_credentials();
    const ApiService service(provider, opt);

    // SIGINT/SIGTERM are handled synchronously on a dedicated thread.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    httplib::Server server;
    // httplib defaults to SO_REUSEPORT, which lets two servers share a port silently.
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    service.mount(server, [](const std::string &line) { std::cerr << line << std::endl; });
    if (!server.bind_to_port(host, port)) fail(kExitIo, "cannot bind " + listen);
    if (opt.credentials_warning) std::cerr << "warning: live backend has no credentials configured\n";
    std::cerr << "serving on http://" << host << ':' << port << " (backend " << provider->backend_name() << ")"
              << std::endl;

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    const bool ok = server.listen_after_bind();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    if (!ok && server.is_running()) return kExitIo;
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Greedy one-per-class preference clustering of points of interest"};
    app.set_version_flag("--version", std::string(prefclust::kVersion));
    app.require_subcommand(1);

    ClusterArgs cargs;
    auto *cluster = app.add_subcommand("cluster", "Cluster a preference tree file");
    cluster->add_option("--input", cargs.input, "Tree file (class,name,lat,lon CSV or nested JSON)")->required();
    cluster->add_option("--format", cargs.format, "Input format (default: by extension)")
        ->check(CLI::IsMember({"csv", "json"}));
    cluster->add_option("--out", cargs.out, "Write result JSON");
    cluster->add_option("--geojson", cargs.geojson, "Write GeoJSON FeatureCollection");
    cluster->add_option("--html", cargs.html, "Write a self-contained HTML map");
    cluster->add_option("--style", cargs.style, "Map tiles")->check(CLI::IsMember({"osm", "openstreetmap", "terrain"}));
    cluster->add_option("--config", cargs.config, "Config file (key = value)");

    FetchArgs fargs;
    auto *fetch = app.add_subcommand("fetch", "Fetch a preference tree from a POI provider");
    fetch->add_option("--place", fargs.place, "Place name to geocode")->required();
    fetch->add_option("--radius-km", fargs.radius_km, "Search radius in km (0, 50]")->required();
    fetch->add_option("--prefs", fargs.prefs, "Comma-separated preferences, in priority order")->required();
    fetch->add_option("--limit", fargs.limit, "Venues per class (1-100)");
    fetch->add_option("--backend", fargs.backend, "live or fixture")->check(CLI::IsMember({"live", "fixture"}));
    fetch->add_option("--fixtures", fargs.fixtures, "Fixture directory");
    fetch->add_option("--out", fargs.out, "Output tree CSV")->required();
    fetch->add_option("--config", fargs.config, "Config file (key = value)");

    ServeArgs sargs;
    auto *serve = app.add_subcommand("serve", "Run the HTTP API and web UI");
    serve->add_option("--listen", sargs.listen, "host:port (default 127.0.0.1:8080)");
    serve->add_option("--backend", sargs.backend, "live or fixture")->check(CLI::IsMember({"live", "fixture"}));
    serve->add_option("--fixtures", sargs.fixtures, "Fixture directory");
    serve->add_option("--ui-dir", sargs.ui_dir, "Built web UI directory");
    serve->add_option("--config", sargs.config, "Config file (key = value)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (*cluster) return run_cluster(cargs);
        if (*fetch) return run_fetch(fargs);
        if (*serve) return run_serve(sargs);
    } catch (const ExitError &e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
