#include "flatflow/surface_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flatflow/error.hpp"

namespace flatflow {

using nlohmann::json;

namespace {

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

Vec2 point_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::Parse, "expected a point [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

EdgeRef edge_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw Error(ErrorCode::Parse, "expected an edge reference [face, edge]");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

std::string surface_to_json(const TranslationSurface& surface) {
  json faces = json::array();
  for (const Polygon& p : surface.faces()) {
    json poly = json::array();
    for (Vec2 v : p.vertices) poly.push_back({v.x, v.y});
    faces.push_back(std::move(poly));
  }
  json pairs = json::array();
  for (const EdgePairing& pr : surface.pairings())
    pairs.push_back({{pr.first.face, pr.first.edge}, {pr.second.face, pr.second.edge}});
  json out;
  out["faces"] = std::move(faces);
  out["pairings"] = std::move(pairs);
  return out.dump(2) + "\n";
}

TranslationSurface surface_from_json(std::string_view text) {
  const json j = parse(text);
  if (!j.is_object() || !j.contains("faces") || !j.contains("pairings") || !j["faces"].is_array() ||
      !j["pairings"].is_array())
    throw Error(ErrorCode::Parse, "surface needs \"faces\" and \"pairings\" arrays");
  std::vector<Polygon> faces;
  for (const json& jf : j["faces"]) {
    if (!jf.is_array()) throw Error(ErrorCode::Parse, "face must be an array of points");
    Polygon p;
    for (const json& jv : jf) p.vertices.push_back(point_from(jv));
    faces.push_back(std::move(p));
  }
  std::vector<EdgePairing> pairs;
  for (const json& jp : j["pairings"]) {
    if (!jp.is_array() || jp.size() != 2) throw Error(ErrorCode::Parse, "pairing must be [[f,e],[f,e]]");
    pairs.push_back({edge_from(jp[0]), edge_from(jp[1])});
  }
  return build_surface(std::move(faces), pairs);
}

RationalPolygon rational_polygon_from_json(std::string_view text, long max_denominator) {
  const json j = parse(text);
  if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array())
    throw Error(ErrorCode::Parse, "polygon needs a \"vertices\" array");
  std::vector<Vec2> vertices;
  for (const json& jv : j["vertices"]) vertices.push_back(point_from(jv));
  if (!j.contains("angles")) return make_rational_polygon(std::move(vertices), max_denominator);
  RationalPolygon poly;
  poly.vertices = std::move(vertices);
  for (const json& ja : j["angles"]) {
    if (!ja.is_array() || ja.size() != 2 || !ja[0].is_number_integer() || !ja[1].is_number_integer())
      throw Error(ErrorCode::Parse, "angle must be [p, q]");
    poly.angles.push_back({ja[0].get<long>(), ja[1].get<long>()});
  }
  return poly;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

TranslationSurface read_surface(const std::filesystem::path& path) { return surface_from_json(read_text_file(path)); }

void write_surface(const std::filesystem::path& path, const TranslationSurface& surface) {
  write_text_file(path, surface_to_json(surface));
}

}  // namespace flatflow
