#pragma once

#include "prefclust/data_io.hpp"
#include "prefclust/engine.hpp"
#include "prefclust/errors.hpp"
#include "prefclust/provider.hpp"
#include "prefclust/tree.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prefclust {

/// Thirty visually distinct colors; class i gets kPalette[i].
inline constexpr std::array<std::string_view, 30> kPalette = {
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6", "#bfef45",
    "#fabed4", "#469990", "#dcbeff", "#9a6324", "#800000", "#aaffc3", "#808000", "#ffd8b1",
    "#000075", "#a9a9a9", "#ffe119", "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79",
};

inline std::string_view class_color(std::size_t class_index) { return kPalette[class_index % kPalette.size()]; }

struct LegendEntry {
    std::string class_name;
    std::string color;
    std::size_t count = 0;
    std::optional<std::string> selected_name;
};

inline std::vector<LegendEntry> legend(const PreferenceTree &tree, const ClusterResult &result) {
    std::vector<LegendEntry> out;
    out.reserve(tree.size());
    for (std::size_t i = 0; i < tree.size(); ++i) {
        LegendEntry e{tree[i].name, std::string(class_color(i)), tree[i].nodes.size(), std::nullopt};
        for (const auto &n : result.selected)
            if (n.class_id == i) e.selected_name = n.name;
        out.push_back(std::move(e));
    }
    return out;
}

inline nlohmann::ordered_json legend_json(const std::vector<LegendEntry> &entries) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto &e : entries) {
        nlohmann::ordered_json j{{"class", e.class_name}, {"color", e.color}, {"count", e.count}};
        j["selected_name"] = e.selected_name ? nlohmann::ordered_json(*e.selected_name) : nlohmann::ordered_json(nullptr);
        arr.push_back(std::move(j));
    }
    return arr;
}

/// RFC 7946 FeatureCollection: one Point per venue (class order, then node
/// order) and, when the result has a boundary, one Polygon last. Selected
/// points carry step, D, T and k (k only when defined).
inline nlohmann::ordered_json geojson_document(const ClusterResult &result, const PreferenceTree &tree) {
    using nlohmann::ordered_json;
    std::vector<const MatrixRow *> row_of(tree.size(), nullptr);
    for (const auto &row : result.matrix) {
        if (!tree.contains(row.node))
            throw InconsistentInput("selected node '" + row.node.name + "' is not in the preference tree");
        row_of[row.node.class_id] = &row;
    }
    for (const auto &n : result.selected)
        if (!tree.contains(n)) throw InconsistentInput("selected node '" + n.name + "' is not in the preference tree");

    auto features = ordered_json::array();
    for (std::size_t ci = 0; ci < tree.size(); ++ci) {
        for (const auto &node : tree[ci].nodes) {
            const MatrixRow *row = row_of[ci] && row_of[ci]->node.index == node.index ? row_of[ci] : nullptr;
            ordered_json props;
            props["class"] = tree[ci].name;
            props["name"] = node.name;
            props["color"] = class_color(ci);
            props["selected"] = row != nullptr;
            if (row) {
                props["step"] = row->step;
                props["D"] = round_sig9(row->D);
                props["T"] = round_sig9(row->T);
                if (row->k) props["k"] = round_sig9(*row->k);
            }
            features.push_back(ordered_json{
                {"type", "Feature"},
                {"geometry",
                 {{"type", "Point"}, {"coordinates", {round_sig9(node.point.lon()), round_sig9(node.point.lat())}}}},
                {"properties", std::move(props)}});
        }
    }
    if (result.hull) {
        auto ring = ordered_json::array();
        for (const auto &p : *result.hull) ring.push_back({round_sig9(p.lon()), round_sig9(p.lat())});
        features.push_back(ordered_json{
            {"type", "Feature"},
            {"geometry", {{"type", "Polygon"}, {"coordinates", ordered_json::array({std::move(ring)})}}},
            {"properties", {{"kind", "boundary"}}}});
    }
    return ordered_json{{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

inline std::string to_geojson(const ClusterResult &result, const PreferenceTree &tree) {
    return geojson_document(result, tree).dump(2) + "\n";
}

struct RenderOptions {
    MapStyle style = MapStyle::OpenStreetMap;
    std::string osm_tiles = "https://tile.openstreetmap.org/{z}/{x}/{y}.png";
    std::string terrain_tiles = "https://tiles.stadiamaps.com/tiles/stamen_terrain/{z}/{x}/{y}.png";
    std::string title = "Preference cluster";
};

namespace render_detail {

inline std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&#39;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

// JSON safe to place inside a <script> element.
inline std::string script_json(const nlohmann::ordered_json &j) {
    std::string s = j.dump();
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '<' && i + 1 < s.size() && s[i + 1] == '/') {
            out += "<\\/";
            ++i;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

} // namespace render_detail

/// Single-file HTML map (Leaflet from a CDN, data inlined).
inline std::string render_html(const ClusterResult &result, const PreferenceTree &tree, const RenderOptions &opt = {}) {
    using render_detail::html_escape;
    const auto doc = geojson_document(result, tree);
    const auto entries = legend(tree, result);
    const bool terrain = opt.style == MapStyle::Terrain;
    const std::string tiles = terrain ? opt.terrain_tiles : opt.osm_tiles;
    const std::string attribution =
        terrain ? "Map tiles by Stamen Design, under CC BY 4.0. Data &copy; OpenStreetMap contributors"
                : "&copy; OpenStreetMap contributors";

    std::string html;
    html += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    html += "<meta name=\"viewport\" content=\"width=device-width, initial-scale=1\">\n";
    html += "<title>" + html_escape(opt.title) + "</title>\n";
    html += "<link rel=\"stylesheet\" href=\"https://unpkg.com/leaflet@1.9.4/dist/leaflet.css\">\n";
    html += "<script src=\"https://unpkg.com/leaflet@1.9.4/dist/leaflet.js\"></script>\n";
    html += "<style>\n"
            "html, body, #map { height: 100%; margin: 0; }\n"
            "#legend { position: absolute; top: 10px; left: 50px; z-index: 1000; background: #fff;\n"
            "  padding: 8px 10px; border-radius: 4px; box-shadow: 0 1px 4px rgba(0,0,0,.4);\n"
            "  font: 13px/1.4 sans-serif; max-height: 80%; overflow-y: auto; }\n"
            "#legend h4 { margin: 0 0 4px; }\n"
            "#legend .swatch { display: inline-block; width: 12px; height: 12px; border-radius: 6px;\n"
            "  margin-right: 6px; vertical-align: middle; }\n"
            "#legend .empty { color: #999; }\n"
            "</style>\n</head>\n<body>\n<div id=\"map\"></div>\n";

    html += "<div id=\"legend\">\n<h4>Preferences</h4>\n";
    for (const auto &e : entries) {
        html += "<div class=\"entry" + std::string(e.count == 0 ? " empty" : "") + "\"><span class=\"swatch\" style=\"background:" +
                e.color + "\"></span>" + html_escape(e.class_name) + " (" + std::to_string(e.count) + ")";
        if (e.selected_name) html += ": <b>" + html_escape(*e.selected_name) + "</b>";
        html += "</div>\n";
    }
    html += "</div>\n";

    html += "<script>\n";
    html += "const data = " + render_detail::script_json(doc) + ";\n";
    html += "const map = L.map('map');\n";
    html += "L.tileLayer(" + nlohmann::json(tiles).dump() + ", {maxZoom: 19, attribution: " +
            nlohmann::json(attribution).dump() + "}).addTo(map);\n";
    html += "function esc(s) { return String(s).replace(/[&<>\"']/g, c => ({'&': '&amp;', '<': '&lt;', '>': '&gt;', '\"': '&quot;', \"'\": '&#39;'}[c])); }\n"
            "const points = data.features.filter(f => f.geometry.type === 'Point');\n"
            "const markers = L.featureGroup();\n"
            "for (const f of points) {\n"
            "  const p = f.properties;\n"
            "  const [lon, lat] = f.geometry.coordinates;\n"
            "  let popup = '<b>' + esc(p.name) + '</b><br>class: ' + esc(p.class);\n"
            "  if (p.selected) {\n"
            "    popup += '<br>step: ' + p.step + '<br>D: ' + p.D + '<br>T: ' + p.T;\n"
            "    if (p.k !== undefined) popup += '<br>k: ' + p.k;\n"
            "  }\n"
            "  L.circleMarker([lat, lon], {\n"
            "    radius: p.selected ? 10 : 5, color: p.selected ? '#000' : p.color, weight: p.selected ? 3 : 1,\n"
            "    fillColor: p.color, fillOpacity: p.selected ? 0.9 : 0.6\n"
            "  }).bindPopup(popup).addTo(markers);\n"
            "}\n"
            "markers.addTo(map);\n";
    if (result.hull) {
        html += "const boundary = data.features.find(f => f.geometry.type === 'Polygon');\n"
                "L.geoJSON(boundary, {style: {color: '#d00', weight: 2, fillOpacity: 0.08}}).addTo(map);\n";
    }
    html += "if (points.length > 0) map.fitBounds(markers.getBounds(), {padding: [30, 30]});\n"
            "else map.setView([0, 0], 2);\n";
    html += "</script>\n</body>\n</html>\n";
    return html;
}

} // namespace prefclust
