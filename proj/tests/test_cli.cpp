#include <gtest/gtest.h>

#include "support/mock_server.hpp"
#include "support/process.hpp"

#include <httplib.h>
#include <json.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>

#include <chrono>
#include <filesystem>
#include <set>
#include <thread>

using namespace prefclust::testing;
namespace fs = std::filesystem;

namespace {

const std::string kCli = PREFCLUST_CLI_PATH;
const fs::path kTests = PREFCLUST_TEST_DATA_DIR;
const std::string kFixtures = PREFCLUST_FIXTURE_DIR;

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        tmp = fs::temp_directory_path() /
              ("prefclust_cli_" + std::to_string(::getpid()) + "_" +
               ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(tmp);
    }
    void TearDown() override { fs::remove_all(tmp); }

    std::string path(const std::string &name) const { return (tmp / name).string(); }

    fs::path tmp;
};

int free_port() {
    const int sock = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    ::bind(sock, reinterpret_cast<sockaddr *>(&addr), sizeof(addr));
    socklen_t len = sizeof(addr);
    ::getsockname(sock, reinterpret_cast<sockaddr *>(&addr), &len);
    ::close(sock);
    return ntohs(addr.sin_port);
}

bool wait_for_health(int port, int attempts = 40) {
    for (int i = 0; i < attempts; ++i) {
        httplib::Client client("127.0.0.1", port);
        client.set_connection_timeout(std::chrono::milliseconds(200));
        if (auto res = client.Get("/api/health"); res && res->status == 200) return true;
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    return false;
}

} // namespace

TEST_F(Cli, ClusterPrintsOneRowPerNonEmptyClass) {
    const auto r = run(kCli, {"cluster", "--input", (kTests / "data" / "kolkata_8.csv").string()});
    ASSERT_EQ(r.exit_code, 0) << r.output;
    std::istringstream lines(r.output);
    std::string line;
    std::getline(lines, line);
    EXPECT_TRUE(line.starts_with("step")) << line;
    for (const char *col : {"name", "class", "D", "T", "k"}) EXPECT_NE(line.find(col), std::string::npos);
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    EXPECT_EQ(rows, 8);
    EXPECT_NE(r.output.find("Oasis Restaurant, Park Street"), std::string::npos);
}

TEST_F(Cli, ClusterReportsSkippedClasses) {
    std::ofstream(path("tree.json")) << R"([{"class":"a","nodes":[{"name":"x","lat":1,"lon":1}]},{"class":"ghost","nodes":[]},
        {"class":"b","nodes":[{"name":"y","lat":1,"lon":2}]}])";
    const auto r = run(kCli, {"cluster", "--input", path("tree.json")});
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("skipped empty classes: ghost"), std::string::npos);
}

TEST_F(Cli, WrongFormatIsValidationError) {
    const auto r = run(kCli, {"cluster", "--input", (kTests / "data" / "kolkata_8.csv").string(), "--format", "json"});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_TRUE(r.output.starts_with("error: ")) << r.output;
    EXPECT_EQ(std::count(r.output.begin(), r.output.end(), '\n'), 1);
}

TEST_F(Cli, BadCoordinateIsValidationError) {
    std::ofstream(path("bad.csv")) << "class,name,lat,lon\npark,Bad,95,0\n";
    const auto r = run(kCli, {"cluster", "--input", path("bad.csv")});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_TRUE(r.output.starts_with("error: BadCoordinate")) << r.output;
}

TEST_F(Cli, MissingInputIsIoError) {
    const auto r = run(kCli, {"cluster", "--input", path("nope.csv")});
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_TRUE(r.output.starts_with("error: ")) << r.output;
}

TEST_F(Cli, UnwritableOutputIsIoError) {
    const auto r = run(kCli, {"cluster", "--input", (kTests / "data" / "kolkata_8.csv").string(), "--out",
                              path("missing-dir/result.json")});
    EXPECT_EQ(r.exit_code, 1);
}

TEST_F(Cli, UnknownFlagIsValidationError) {
    const auto r = run(kCli, {"cluster", "--bogus"});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_TRUE(r.output.starts_with("error: ")) << r.output;
}

TEST_F(Cli, HtmlOutputStartsWithDoctype) {
    const auto r = run(kCli, {"cluster", "--input", (kTests / "data" / "kolkata_8.csv").string(), "--html",
                              path("map.html"), "--style", "terrain"});
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto html = read_text(path("map.html"));
    EXPECT_TRUE(html.starts_with("<!DOCTYPE html>"));
    EXPECT_NE(html.find("stamen_terrain"), std::string::npos);
}

TEST_F(Cli, OutputsMatchGoldens) {
    const auto r = run(kCli, {"cluster", "--input", (kTests / "data" / "kolkata_8.csv").string(), "--out",
                              path("r.json"), "--geojson", path("r.geojson"), "--html", path("r.html")});
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_EQ(read_text(path("r.json")), read_text(kTests / "golden" / "kolkata_8.result.json"));
    EXPECT_EQ(read_text(path("r.geojson")), read_text(kTests / "golden" / "kolkata_8.geojson"));
    EXPECT_EQ(read_text(path("r.html")), read_text(kTests / "golden" / "kolkata_8.html"));
}

TEST_F(Cli, ConfigFileOverridesTiles) {
    std::ofstream(path("prefclust.conf")) << "[tiles]\nosm = https://tiles.example/{z}/{x}/{y}.png\n";
    const auto r = run(kCli, {"cluster", "--input", (kTests / "data" / "kolkata_8.csv").string(), "--html",
                              path("map.html"), "--config", path("prefclust.conf")});
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(read_text(path("map.html")).find("https://tiles.example/{z}/{x}/{y}.png"), std::string::npos);
}

TEST_F(Cli, FetchKolkataEightPreferences) {
    const auto r = run(kCli, {"fetch", "--place", "Kolkata", "--radius-km", "9", "--prefs",
                              "restaurant,gym,park,ice cream,movie,hospital,river,books", "--backend", "fixture",
                              "--fixtures", kFixtures, "--out", path("tree.csv")});
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("ice cream: 2"), std::string::npos) << r.output;
    const auto csv = read_text(path("tree.csv"));
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "class,name,lat,lon");
    std::set<std::string> classes;
    while (std::getline(lines, line)) classes.insert(line.substr(0, line.find(',')));
    EXPECT_EQ(classes.size(), 8u);
    EXPECT_EQ(csv, read_text(kTests / "data" / "kolkata_8.csv"));
}

TEST_F(Cli, FetchRadiusBound) {
    const auto r = run(kCli, {"fetch", "--place", "Kolkata", "--radius-km", "60", "--prefs", "gym", "--fixtures",
                              kFixtures, "--out", path("tree.csv")});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_TRUE(r.output.starts_with("error: ")) << r.output;
    EXPECT_NE(r.output.find("radius_km"), std::string::npos);
    EXPECT_FALSE(fs::exists(path("tree.csv")));
}

TEST_F(Cli, FetchUnknownPlace) {
    const auto r = run(kCli, {"fetch", "--place", "Atlantis", "--radius-km", "5", "--prefs", "gym", "--backend",
                              "fixture", "--fixtures", kFixtures, "--out", path("tree.csv")});
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_TRUE(r.output.starts_with("error: NotFound")) << r.output;
}

TEST_F(Cli, ServeHealthAndCleanShutdown) {
    const int port = free_port();
    ChildProcess server(kCli, {"serve", "--listen", "127.0.0.1:" + std::to_string(port), "--backend", "fixture",
                               "--fixtures", kFixtures},
                        path("serve.log"));
    ASSERT_TRUE(wait_for_health(port));
    httplib::Client client("127.0.0.1", port);
    auto res = client.Get("/api/health");
    ASSERT_TRUE(res);
    EXPECT_EQ(nlohmann::json::parse(res->body)["backend"], "fixture");
    server.signal(SIGINT);
    EXPECT_EQ(server.wait(), 0);
    const auto log = read_text(path("serve.log"));
    EXPECT_NE(log.find("GET /api/health 200"), std::string::npos) << log;
}

TEST_F(Cli, ServeOnOccupiedPortFails) {
    BackgroundServer squatter;
    squatter.start();
    const auto r = run(kCli, {"serve", "--listen", "127.0.0.1:" + std::to_string(squatter.port()), "--fixtures", kFixtures});
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_TRUE(r.output.starts_with("error: ")) << r.output;
}

TEST_F(Cli, ServeLiveWithoutCredentialsWarns) {
    const int port = free_port();
    ChildProcess server(kCli, {"serve", "--listen", "127.0.0.1:" + std::to_string(port), "--backend", "live"},
                        path("serve.log"));
    ASSERT_TRUE(wait_for_health(port));
    httplib::Client client("127.0.0.1", port);
    auto res = client.Get("/api/health");
    ASSERT_TRUE(res);
    const auto doc = nlohmann::json::parse(res->body);
    EXPECT_EQ(doc["backend"], "live");
    EXPECT_EQ(doc["credentials_warning"], true);
    server.signal(SIGTERM);
    EXPECT_EQ(server.wait(), 0);
}
