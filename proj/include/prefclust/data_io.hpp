#pragma once

#include "prefclust/engine.hpp"
#include "prefclust/errors.hpp"
#include "prefclust/geo.hpp"
#include "prefclust/tree.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace prefclust {

namespace io_detail {

inline std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// Shortest text that round-trips the double.
inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

struct CsvRecord {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

// RFC 4180 records: quoted fields may hold commas, quotes ("") and newlines.
inline std::vector<CsvRecord> split_csv(std::string_view text) {
    std::vector<CsvRecord> records;
    CsvRecord rec;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    rec.line = line;

    auto end_field = [&] {
        rec.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = rec.fields.size() == 1 && trim(rec.fields[0]).empty();
        if (!blank) records.push_back(std::move(rec));
        rec = CsvRecord{};
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started && trim(field).empty()) {
            field.clear();
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            end_record();
            rec.line = ++line;
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes)
        throw ParseError(ParseError::Kind::Malformed, std::to_string(rec.line),
                         "row " + std::to_string(rec.line) + ": unterminated quoted field");
    if (!field.empty() || !rec.fields.empty()) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        end_record();
    }
    return records;
}

inline std::string csv_escape(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos && trim(s).size() == s.size())
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace io_detail

/// Parses `class,name,lat,lon` rows into a tree. Classes appear in order of
/// first appearance (matched ignoring case); rows keep file order within a
/// class. Row numbers in errors count the header as row 1.
inline PreferenceTree parse_tree_csv(std::string_view text) {
    using io_detail::trim;
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    if (trim(text).empty()) throw ParseError(ParseError::Kind::EmptyFile, "1", "input is empty");

    const auto records = io_detail::split_csv(text);
    const auto &header = records.front();
    static constexpr std::string_view expected[] = {"class", "name", "lat", "lon"};
    bool header_ok = header.fields.size() == 4;
    for (std::size_t i = 0; header_ok && i < 4; ++i)
        header_ok = iequals(trim(header.fields[i]), expected[i]);
    if (!header_ok)
        throw ParseError(ParseError::Kind::BadHeader, "1", "header must be exactly class,name,lat,lon");

    PreferenceTree tree;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto &rec = records[r];
        const auto row = std::to_string(rec.line);
        if (rec.fields.size() != 4)
            throw ParseError(ParseError::Kind::Malformed, row,
                             "row " + row + ": expected 4 fields, got " + std::to_string(rec.fields.size()));
        const std::string cls(trim(rec.fields[0]));
        const std::string name(trim(rec.fields[1]));
        if (cls.empty() || name.empty())
            throw ParseError(ParseError::Kind::Malformed, row, "row " + row + ": empty class or name");
        const auto lat = io_detail::parse_double(rec.fields[2]);
        const auto lon = io_detail::parse_double(rec.fields[3]);
        if (!lat || !lon)
            throw ParseError(ParseError::Kind::BadCoordinate, row, "row " + row + ": coordinate is not a number");
        GeoPoint point = GeoPoint::make(0.0, 0.0);
        try {
            point = GeoPoint::make(*lat, *lon);
        } catch (const OutOfRange &e) {
            throw ParseError(ParseError::Kind::BadCoordinate, row, "row " + row + ": " + e.what());
        }
        auto id = tree.find_class(cls);
        if (!id) id = tree.add_class(cls);
        tree.add_node(*id, name, point);
    }
    return tree;
}

/// Writes the tree back as `class,name,lat,lon` CSV with LF line endings.
/// Empty classes have no rows and are therefore dropped.
inline std::string write_tree_csv(const PreferenceTree &tree) {
    std::string out = "class,name,lat,lon\n";
    for (const auto &c : tree.classes()) {
        for (const auto &n : c.nodes) {
            out += io_detail::csv_escape(c.name) + ',' + io_detail::csv_escape(n.name) + ',' +
                   io_detail::format_double(n.point.lat()) + ',' + io_detail::format_double(n.point.lon()) + '\n';
        }
    }
    return out;
}

/// Builds a tree from the nested JSON form `[{class, nodes: [{name, lat, lon}]}]`.
/// Repeated class names (ignoring case) are merged into the first occurrence
/// and reported through `warnings` when given.
inline PreferenceTree tree_from_json(const nlohmann::json &doc, std::vector<std::string> *warnings = nullptr) {
    using Kind = ParseError::Kind;
    if (!doc.is_array()) throw ParseError(Kind::Malformed, "$", "$: expected an array of classes");

    PreferenceTree tree;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto &entry = doc[i];
        const std::string path = "$[" + std::to_string(i) + "]";
        if (!entry.is_object()) throw ParseError(Kind::Malformed, path, path + ": expected an object");
        if (!entry.contains("class") || !entry["class"].is_string())
            throw ParseError(Kind::Malformed, path + ".class", path + ".class: expected a string");
        const std::string cls(io_detail::trim(entry["class"].get<std::string>()));
        if (cls.empty()) throw ParseError(Kind::Malformed, path + ".class", path + ".class: empty class name");
        if (!entry.contains("nodes") || !entry["nodes"].is_array())
            throw ParseError(Kind::Malformed, path + ".nodes", path + ".nodes: expected an array");

        auto id = tree.find_class(cls);
        if (id) {
            if (warnings)
                warnings->push_back("duplicate class '" + cls + "' at " + path + " merged into '" +
                                    tree[*id].name + "'");
        } else {
            id = tree.add_class(cls);
        }

        const auto &nodes = entry["nodes"];
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const auto &node = nodes[j];
            const std::string npath = path + ".nodes[" + std::to_string(j) + "]";
            if (!node.is_object()) throw ParseError(Kind::Malformed, npath, npath + ": expected an object");
            if (!node.contains("name") || !node["name"].is_string())
                throw ParseError(Kind::Malformed, npath + ".name", npath + ".name: expected a string");
            const std::string name(io_detail::trim(node["name"].get<std::string>()));
            if (name.empty()) throw ParseError(Kind::Malformed, npath + ".name", npath + ".name: empty name");
            for (const char *key : {"lat", "lon"}) {
                if (!node.contains(key) || !node[key].is_number())
                    throw ParseError(Kind::BadCoordinate, npath + "." + key,
                                     npath + "." + key + ": expected a number");
            }
            try {
                tree.add_node(*id, name, GeoPoint::make(node["lat"].get<double>(), node["lon"].get<double>()));
            } catch (const OutOfRange &e) {
                throw ParseError(Kind::BadCoordinate, npath + "." + e.field(), npath + ": " + e.what());
            }
        }
    }
    return tree;
}

inline PreferenceTree parse_tree_json(std::string_view text, std::vector<std::string> *warnings = nullptr) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(ParseError::Kind::Malformed, "$", std::string("$: invalid JSON: ") + e.what());
    }
    return tree_from_json(doc, warnings);
}

inline nlohmann::ordered_json tree_to_json(const PreferenceTree &tree) {
    auto doc = nlohmann::ordered_json::array();
    for (const auto &c : tree.classes()) {
        auto nodes = nlohmann::ordered_json::array();
        for (const auto &n : c.nodes)
            nodes.push_back({{"name", n.name}, {"lat", n.point.lat()}, {"lon", n.point.lon()}});
        doc.push_back({{"class", c.name}, {"nodes", std::move(nodes)}});
    }
    return doc;
}

/// Rounds to 9 significant digits; the JSON writer then prints the shortest
/// form, so no more than 9 digits reach the output.
inline double round_sig9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::strtod(buf, nullptr);
}

namespace io_detail {

inline nlohmann::ordered_json node_json(const Node &n, const std::string &class_name) {
    return {{"class", class_name},
            {"class_id", n.class_id},
            {"index", n.index},
            {"name", n.name},
            {"lat", round_sig9(n.point.lat())},
            {"lon", round_sig9(n.point.lon())}};
}

inline Node node_from_json(const nlohmann::json &j) {
    return Node{j.at("class_id").get<std::size_t>(), j.at("index").get<std::size_t>(),
                j.at("name").get<std::string>(),
                GeoPoint::make(j.at("lat").get<double>(), j.at("lon").get<double>())};
}

} // namespace io_detail

/// JSON document for a result, fields in fixed order:
/// selected, matrix, skipped_classes, hull, distance_evals.
inline nlohmann::ordered_json result_to_json(const ClusterResult &result) {
    using nlohmann::ordered_json;
    ordered_json doc;

    auto selected = ordered_json::array();
    for (std::size_t i = 0; i < result.selected.size(); ++i) {
        const auto &cls = i < result.matrix.size() ? result.matrix[i].class_name : std::string();
        selected.push_back(io_detail::node_json(result.selected[i], cls));
    }
    doc["selected"] = std::move(selected);

    auto matrix = ordered_json::array();
    for (const auto &row : result.matrix) {
        ordered_json r;
        r["step"] = row.step;
        r["name"] = row.node.name;
        r["class"] = row.class_name;
        r["class_id"] = row.node.class_id;
        r["index"] = row.node.index;
        r["lat"] = round_sig9(row.node.point.lat());
        r["lon"] = round_sig9(row.node.point.lon());
        r["list_s"] = row.s_snapshot;
        r["D"] = round_sig9(row.D);
        r["T"] = round_sig9(row.T);
        if (row.k) r["k"] = round_sig9(*row.k);
        matrix.push_back(std::move(r));
    }
    doc["matrix"] = std::move(matrix);
    doc["skipped_classes"] = result.skipped_classes;

    if (result.hull) {
        auto ring = ordered_json::array();
        for (const auto &p : *result.hull)
            ring.push_back({{"lat", round_sig9(p.lat())}, {"lon", round_sig9(p.lon())}});
        doc["hull"] = std::move(ring);
    } else {
        doc["hull"] = nullptr;
    }
    doc["distance_evals"] = result.distance_evals;
    return doc;
}

inline std::string serialize_result_json(const ClusterResult &result) {
    return result_to_json(result).dump(2) + "\n";
}

/// Inverse of serialize_result_json (numbers come back at 9 significant digits).
inline ClusterResult parse_result_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
        ClusterResult r;
        for (const auto &s : doc.at("selected")) r.selected.push_back(io_detail::node_from_json(s));
        for (const auto &m : doc.at("matrix")) {
            MatrixRow row;
            row.step = m.at("step").get<std::size_t>();
            row.node = io_detail::node_from_json(m);
            row.class_name = m.at("class").get<std::string>();
            row.s_snapshot = m.at("list_s").get<std::vector<std::string>>();
            row.D = m.at("D").get<double>();
            row.T = m.at("T").get<double>();
            if (m.contains("k")) row.k = m.at("k").get<double>();
            r.matrix.push_back(std::move(row));
        }
        r.skipped_classes = doc.at("skipped_classes").get<std::vector<std::string>>();
        if (!doc.at("hull").is_null()) {
            std::vector<GeoPoint> ring;
            for (const auto &p : doc.at("hull"))
                ring.push_back(GeoPoint::make(p.at("lat").get<double>(), p.at("lon").get<double>()));
            r.hull = std::move(ring);
        }
        r.distance_evals = doc.at("distance_evals").get<std::size_t>();
        return r;
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(ParseError::Kind::Malformed, "$", std::string("$: ") + e.what());
    }
}

} // namespace prefclust
