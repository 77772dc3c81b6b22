#pragma once

#include <json.hpp>

#include "pexstab/control.hpp"
#include "pexstab/domain.hpp"
#include "pexstab/funcspace.hpp"
#include "pexstab/stabilizer.hpp"

namespace pexstab::io {

using nlohmann::json;

json to_json(const Point& p);
Point point_from_json(const json& j, int dim);

json to_json(const Value& v);
Value value_from_json(const json& j, int r);

/// Dense tables: array of r-arrays in carrier enumeration order (plain numbers are
/// accepted when r = 1). Polynomials: {constant, linear, quadratic, noise:[{point, value}]}.
json to_json(const FuncRep& f);
FuncRep funcrep_from_json(const json& j, const Carrier& carrier, int r);

Carrier carrier_from_json(const json& j);
json to_json(const Carrier& c);

/// Row-major integer array of length d*d.
Automorphism automorphism_from_json(const json& j, int dim);
json to_json(const Automorphism& a);

ControlFn control_from_json(const json& j, const Carrier& carrier);

json to_json(const IterationTrace& t);
json to_json(const StabilityReport& r);
json to_json(const Decomposition& d);

}  // namespace pexstab::io
