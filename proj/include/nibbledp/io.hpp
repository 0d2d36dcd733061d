#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "nibbledp/colouring.hpp"
#include "nibbledp/correspondence.hpp"
#include "nibbledp/errors.hpp"
#include "nibbledp/graph.hpp"

namespace nibbledp {

struct Instance {
    SimpleGraph graph;
    EdgeCorrespondence corr;
};

namespace detail {

using Json = nlohmann::ordered_json;

inline const Json& json_field(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw Error(Err::parse_error, std::string("missing field '") + key + "'");
    return *it;
}

inline std::uint64_t json_uint(const Json& j, const char* key) {
    const Json& f = json_field(j, key);
    if (!f.is_number_unsigned()) {
        throw Error(Err::parse_error, std::string("field '") + key + "' must be a non-negative integer");
    }
    return f.get<std::uint64_t>();
}

inline const Json& json_array(const Json& j, const char* key) {
    const Json& f = json_field(j, key);
    if (!f.is_array()) throw Error(Err::parse_error, std::string("field '") + key + "' must be an array");
    return f;
}

/// A two-element array of unsigned integers, the file encoding of edges,
/// matched colour pairs, and colour assignments.
inline std::pair<std::uint64_t, std::uint64_t> json_uint_pair(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned()) {
        throw Error(Err::parse_error,
                    std::string(what) + " must be a two-element array of non-negative integers");
    }
    return {j[0].get<std::uint64_t>(), j[1].get<std::uint64_t>()};
}

inline Json json_parse(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        throw Error(Err::parse_error, std::string("json: ") + ex.what());
    }
}

inline void check_version(const Json& j) {
    if (json_uint(j, "version") != 1) {
        throw Error(Err::parse_error, "unsupported file version");
    }
}

} // namespace detail

inline std::string instance_to_json(const SimpleGraph& g, const EdgeCorrespondence& c) {
    detail::Json j;
    j["version"] = 1;
    j["vertex_count"] = g.vertex_count();
    auto edges = detail::Json::array();
    for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
    j["edges"] = std::move(edges);
    detail::Json cj;
    cj["q"] = c.q();
    auto matchings = detail::Json::array();
    for (const RawMatching& rm : c.to_raw()) {
        detail::Json mj;
        mj["edge_a"] = rm.edge_a;
        mj["edge_b"] = rm.edge_b;
        auto pairs = detail::Json::array();
        for (const MatchPair& mp : rm.pairs) pairs.push_back({mp.first, mp.second});
        mj["pairs"] = std::move(pairs);
        matchings.push_back(std::move(mj));
    }
    cj["matchings"] = std::move(matchings);
    j["correspondence"] = std::move(cj);
    return j.dump(2) + "\n";
}

inline Instance instance_from_json(const std::string& text) {
    const detail::Json j = detail::json_parse(text);
    if (!j.is_object()) throw Error(Err::parse_error, "instance file must be a json object");
    detail::check_version(j);
    const auto vertex_count = detail::json_uint(j, "vertex_count");
    if (vertex_count > 0xFFFFFFFFULL) throw Error(Err::parse_error, "vertex_count too large");

    std::vector<std::array<VertexId, 2>> edges;
    for (const auto& ej : detail::json_array(j, "edges")) {
        const auto [u, v] = detail::json_uint_pair(ej, "edge");
        if (u > 0xFFFFFFFFULL || v > 0xFFFFFFFFULL) throw Error(Err::parse_error, "edge endpoint too large");
        edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v)});
    }
    SimpleGraph graph = SimpleGraph::build(static_cast<VertexId>(vertex_count), edges);

    const detail::Json& cj = detail::json_field(j, "correspondence");
    if (!cj.is_object()) throw Error(Err::parse_error, "field 'correspondence' must be an object");
    const auto q = detail::json_uint(cj, "q");
    if (q == 0 || q > 0xFFFFFFFFULL) throw Error(Err::parse_error, "palette size q out of range");

    std::vector<RawMatching> matchings;
    for (const auto& mj : detail::json_array(cj, "matchings")) {
        if (!mj.is_object()) throw Error(Err::parse_error, "each matching must be a json object");
        RawMatching rm;
        const auto a = detail::json_uint(mj, "edge_a");
        const auto b = detail::json_uint(mj, "edge_b");
        if (a > 0xFFFFFFFFULL || b > 0xFFFFFFFFULL) throw Error(Err::parse_error, "edge id too large");
        rm.edge_a = static_cast<EdgeId>(a);
        rm.edge_b = static_cast<EdgeId>(b);
        for (const auto& pj : detail::json_array(mj, "pairs")) {
            const auto [x, y] = detail::json_uint_pair(pj, "colour pair");
            if (x == 0 || y == 0 || x > q || y > q) {
                throw Error(Err::parse_error, "matched colour outside palette 1.." + std::to_string(q));
            }
            rm.pairs.emplace_back(static_cast<Colour>(x), static_cast<Colour>(y));
        }
        matchings.push_back(std::move(rm));
    }
    EdgeCorrespondence corr =
        EdgeCorrespondence::build(graph, static_cast<Colour>(q), matchings);
    return Instance{std::move(graph), std::move(corr)};
}

/// Assigned edges only, ascending edge id.
inline std::string colouring_to_json(const Colouring& col) {
    detail::Json j;
    j["version"] = 1;
    auto colours = detail::Json::array();
    for (EdgeId e = 0; e < col.colour.size(); ++e) {
        if (col.colour[e]) colours.push_back({e, *col.colour[e]});
    }
    j["colours"] = std::move(colours);
    return j.dump(2) + "\n";
}

inline Colouring colouring_from_json(const std::string& text, EdgeId edge_count) {
    const detail::Json j = detail::json_parse(text);
    if (!j.is_object()) throw Error(Err::parse_error, "colouring file must be a json object");
    detail::check_version(j);
    Colouring col(edge_count);
    for (const auto& cj : detail::json_array(j, "colours")) {
        const auto [e, c] = detail::json_uint_pair(cj, "colour assignment");
        if (e >= edge_count) {
            throw Error(Err::parse_error, "edge id " + std::to_string(e) + " outside 0.." +
                                              std::to_string(edge_count) + "-1");
        }
        if (c == 0 || c > 0xFFFFFFFFULL) throw Error(Err::parse_error, "colour out of range");
        if (col.colour[static_cast<EdgeId>(e)]) {
            throw Error(Err::parse_error, "edge " + std::to_string(e) + " assigned twice");
        }
        col.colour[static_cast<EdgeId>(e)] = static_cast<Colour>(c);
    }
    return col;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Err::parse_error, "cannot read file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Err::parse_error, "cannot write file " + path);
    out << content;
    out.flush();
    if (!out) throw Error(Err::parse_error, "write to " + path + " failed");
}

} // namespace nibbledp
