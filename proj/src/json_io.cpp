#include "cvx/json_io.hpp"

#include <string>

#include "cvx/errors.hpp"

namespace cvx {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) { throw PreconditionViolation("instance JSON: " + what); }

double number(const json& j, const char* what) {
  if (!j.is_number()) malformed(std::string(what) + " must be a number");
  return j.get<double>();
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

}  // namespace

json vec_json(const Vec& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json mat_json(const Mat& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(vec_json(m.row(i).transpose()));
  return out;
}

Vec vec_from_json(const json& j) {
  if (!j.is_array()) malformed("vector must be an array");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number(j[i], "vector entry");
  return v;
}

Mat mat_from_json(const json& j) {
  if (!j.is_array()) malformed("matrix must be an array of rows");
  if (j.empty()) return Mat(0, 0);
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  Mat m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) malformed("matrix rows must be arrays of equal length");
    for (std::size_t k = 0; k < cols; ++k) m(static_cast<Index>(i), static_cast<Index>(k)) = number(j[i][k], "matrix entry");
  }
  return m;
}

json to_json(const ConvexFunction<double>& f) {
  if (f.is_max_affine()) {
    const auto& g = f.as_max_affine();
    json pieces = json::array();
    for (Index i = 0; i < g.pieces(); ++i) {
      pieces.push_back({{"a", vec_json(g.gradients().row(i).transpose())}, {"b", g.offsets()(i)}});
    }
    return {{"type", "max_affine"}, {"pieces", pieces}};
  }
  if (f.is_quadratic()) {
    const auto& q = f.as_quadratic();
    return {{"type", "quadratic"}, {"Q", mat_json(q.Q())}, {"c", vec_json(q.c())}, {"r0", q.r0()}};
  }
  json parts = json::array();
  for (const auto& p : f.as_sum().parts) parts.push_back(to_json(p));
  return {{"type", "sum"}, {"parts", parts}};
}

ConvexFunction<double> function_from_json(const json& j) {
  const json& type = field(j, "type");
  if (!type.is_string()) malformed("\"type\" must be a string");
  const std::string t = type.get<std::string>();
  if (t == "max_affine") {
    const json& pieces = field(j, "pieces");
    if (!pieces.is_array() || pieces.empty()) malformed("\"pieces\" must be a nonempty array");
    std::vector<AffinePiece<double>> out;
    for (const auto& p : pieces) out.push_back({vec_from_json(field(p, "a")), number(field(p, "b"), "b")});
    return MaxAffine<double>::from_pieces(out);
  }
  if (t == "quadratic") {
    Mat Q = mat_from_json(field(j, "Q"));
    Vec c = j.contains("c") ? vec_from_json(j.at("c")) : Vec::Zero(Q.rows());
    const double r0 = j.contains("r0") ? number(j.at("r0"), "r0") : 0.0;
    return Quadratic<double>(std::move(Q), std::move(c), r0);
  }
  if (t == "sum") {
    const json& parts = field(j, "parts");
    if (!parts.is_array() || parts.empty()) malformed("\"parts\" must be a nonempty array");
    std::vector<ConvexFunction<double>> out;
    for (const auto& p : parts) out.push_back(function_from_json(p));
    return ConvexFunction<double>::sum(std::move(out));
  }
  malformed("unknown function type \"" + t + "\"");
}

json to_json(const PolyhedralDomain& C) {
  json ineqs = json::array();
  for (Index i = 0; i < C.inequalities(); ++i) {
    ineqs.push_back({{"g", vec_json(C.G().row(i).transpose())}, {"h", C.h()(i)}});
  }
  return {{"inequalities", ineqs}, {"box_radius", C.box_radius()}};
}

PolyhedralDomain domain_from_json(const json& j, Index dim) {
  const double radius = number(field(j, "box_radius"), "box_radius");
  Mat G(0, dim);
  Vec h(0);
  if (j.contains("inequalities")) {
    const json& ineqs = j.at("inequalities");
    if (!ineqs.is_array()) malformed("\"inequalities\" must be an array");
    G.resize(static_cast<Index>(ineqs.size()), dim);
    h.resize(static_cast<Index>(ineqs.size()));
    for (std::size_t i = 0; i < ineqs.size(); ++i) {
      const Vec g = vec_from_json(field(ineqs[i], "g"));
      require_dims(dim, g.size(), "domain inequality");
      G.row(static_cast<Index>(i)) = g.transpose();
      h(static_cast<Index>(i)) = number(field(ineqs[i], "h"), "h");
    }
  }
  return PolyhedralDomain(dim, radius, std::move(G), std::move(h));
}

json to_json(const Polytope<double>& P) {
  json gens = json::array();
  for (Index i = 0; i < P.size(); ++i) gens.push_back(vec_json(P.generator(i)));
  return {{"ambient_dim", P.ambient_dim()}, {"generators", gens}};
}

}  // namespace cvx
