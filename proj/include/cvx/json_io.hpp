#pragma once

// Shared instance JSON schema:
//   function  {"type":"max_affine","pieces":[{"a":[...],"b":0.0},...]}
//             {"type":"quadratic","Q":[[...]],"c":[...],"r0":0.0}
//             {"type":"sum","parts":[<function>,...]}
//   operator  "S": [[...]] (row-major), "zeta": [...]
//   domain    {"inequalities":[{"g":[...],"h":...}],"box_radius":R}
//   marginal  {"f":<function>,"S":[[...]]}

#include <json.hpp>

#include "cvx/argmin.hpp"
#include "cvx/convex_function.hpp"
#include "cvx/linalg.hpp"

namespace cvx {

nlohmann::json vec_json(const Vec& v);
nlohmann::json mat_json(const Mat& m);
Vec vec_from_json(const nlohmann::json& j);
/// Rows of equal length; an empty array gives a 0 x 0 matrix.
Mat mat_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ConvexFunction<double>& f);
ConvexFunction<double> function_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PolyhedralDomain& C);
PolyhedralDomain domain_from_json(const nlohmann::json& j, Index dim);

nlohmann::json to_json(const Polytope<double>& P);

}  // namespace cvx
