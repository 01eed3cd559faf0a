#pragma once

// JSON body and function specs for the command-line front end.

#include "duality/duality.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace duality::cli {

using Json = nlohmann::json;

struct NormSpec {
  ReferenceNorm norm;
  NormDescriptor desc;
};

struct ConeSpec {
  ReferenceCone cone;
  ConeDescriptor desc;
};

struct FunctionSpec {
  ReferenceFunction function;
  GrowthCertificate cert;
};

using BodySpec = std::variant<NormSpec, ConeSpec, FunctionSpec>;

namespace detail {

inline double number(const Json &j, const char *key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("spec: missing field \"") + key + "\"");
  const Json &v = j.at(key);
  if (!v.is_number()) throw InvalidArgument(std::string("spec: field \"") + key + "\" must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidArgument(std::string("spec: field \"") + key + "\" must be finite");
  return x;
}

inline int integer(const Json &j, const char *key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("spec: missing field \"") + key + "\"");
  const Json &v = j.at(key);
  if (!v.is_number_integer()) throw InvalidArgument(std::string("spec: field \"") + key + "\" must be an integer");
  const auto x = v.get<long long>();
  if (x < 1 || x > 1000000) throw InvalidArgument(std::string("spec: field \"") + key + "\" out of range");
  return static_cast<int>(x);
}

inline Vector vector(const Json &j, const char *key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw InvalidArgument(std::string("spec: field \"") + key + "\" must be an array");
  const Json &arr = j.at(key);
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw InvalidArgument(std::string("spec: field \"") + key + "\" must hold numbers");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  checked(v);
  return v;
}

inline Matrix matrix(const Json &j, const char *key) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).empty())
    throw InvalidArgument(std::string("spec: field \"") + key + "\" must be a nonempty array of rows");
  const Json &rows = j.at(key);
  const std::size_t m = rows.size();
  if (!rows[0].is_array() || rows[0].empty()) throw InvalidArgument("spec: rows must be nonempty arrays");
  const std::size_t n = rows[0].size();
  Matrix out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) throw InvalidArgument("spec: rows must have equal length");
    for (std::size_t k = 0; k < n; ++k) {
      if (!rows[i][k].is_number()) throw InvalidArgument("spec: rows must hold numbers");
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k].get<double>();
    }
  }
  if (!out.allFinite()) throw InvalidArgument("spec: rows must be finite");
  return out;
}

inline double exponent(const Json &j) {
  if (!j.contains("p")) throw InvalidArgument("spec: missing field \"p\"");
  const Json &v = j.at("p");
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInf;
    throw InvalidArgument("spec: \"p\" must be a number or \"inf\"");
  }
  if (!v.is_number()) throw InvalidArgument("spec: \"p\" must be a number or \"inf\"");
  return v.get<double>();
}

/// Replaces the computed constants with user-supplied ones after checking them
/// on random unit vectors.
inline NormDescriptor sandwich(const Json &j, const ReferenceNorm &norm) {
  if (!j.contains("sandwich")) return norm.descriptor();
  const Json &s = j.at("sandwich");
  if (!s.is_object()) throw InvalidArgument("spec: \"sandwich\" must be an object");
  const NormDescriptor d = NormDescriptor::make(norm.dim(), number(s, "k"), number(s, "K"));
  CounterRng rng(0x73616e64ULL, static_cast<std::uint64_t>(d.n));
  for (int i = 0; i < 1000; ++i) {
    const double v = norm.eval(rng.unit_vector(d.n));
    if (v < d.k_lo || v > d.k_hi) throw InvalidArgument("spec: sandwich constants violated by the norm");
  }
  return d;
}

inline ConeDescriptor interior(const Json &j, const ReferenceCone &cone) {
  if (!j.contains("interior")) {
    const ConeInteriorData d = cone.interior_data();
    return normalize_cone(d.a, d.b, d.eps_a, d.eps_b);
  }
  const Json &s = j.at("interior");
  if (!s.is_object()) throw InvalidArgument("spec: \"interior\" must be an object");
  const Vector a = vector(s, "a");
  const Vector b = vector(s, "b");
  if (a.size() != cone.dim() || b.size() != cone.dim())
    throw InvalidArgument("spec: interior points have the wrong dimension");
  if (!cone.member(a) || !cone.dual().member(b)) throw InvalidArgument("spec: interior points lie outside the cones");
  return normalize_cone(a, b, number(s, "eps_a"), number(s, "eps_b"));
}

}  // namespace detail

inline BodySpec parse_spec(const Json &j) {
  if (!j.is_object()) throw InvalidArgument("spec: top level must be an object");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw InvalidArgument("spec: missing string field \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "lp_norm") {
    auto norm = ReferenceNorm::lp(detail::integer(j, "n"), detail::exponent(j));
    return NormSpec{norm, detail::sandwich(j, norm)};
  }
  if (kind == "weighted_l2") {
    const Vector w = detail::vector(j, "weights");
    if (j.contains("n") && detail::integer(j, "n") != w.size()) throw InvalidArgument("spec: n disagrees with weights");
    auto norm = ReferenceNorm::weighted_l2(w);
    return NormSpec{norm, detail::sandwich(j, norm)};
  }
  if (kind == "polyhedral_norm") {
    const Matrix rows = detail::matrix(j, "rows");
    if (j.contains("n") && detail::integer(j, "n") != rows.cols()) throw InvalidArgument("spec: n disagrees with rows");
    auto norm = ReferenceNorm::polyhedral(rows);
    return NormSpec{norm, detail::sandwich(j, norm)};
  }
  if (kind == "orthant" || kind == "soc") {
    const int n = detail::integer(j, "n");
    auto cone = kind == "orthant" ? ReferenceCone::orthant(n) : ReferenceCone::second_order(n);
    return ConeSpec{cone, detail::interior(j, cone)};
  }
  if (kind == "psd") {
    auto cone = ReferenceCone::psd(detail::integer(j, "d"));
    return ConeSpec{cone, detail::interior(j, cone)};
  }
  if (kind == "function") {
    if (!j.contains("name") || !j.at("name").is_string()) throw InvalidArgument("spec: missing string field \"name\"");
    auto f = ReferenceFunction::by_name(j.at("name").get<std::string>(), detail::integer(j, "n"));
    GrowthCertificate cert = f.certificate();
    if (j.contains("growth")) {
      const Json &g = j.at("growth");
      if (!g.is_object()) throw InvalidArgument("spec: \"growth\" must be an object");
      cert = GrowthCertificate::make(detail::number(g, "k_f"), detail::number(g, "K_f"), detail::number(g, "s"),
                                     detail::number(g, "t"), detail::number(g, "r"));
    }
    return FunctionSpec{f, cert};
  }
  throw InvalidArgument("spec: unknown kind \"" + kind + "\"");
}

inline BodySpec load_spec(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open spec file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  Json j;
  try {
    j = Json::parse(buf.str());
  } catch (const Json::parse_error &e) {
    throw InvalidArgument(std::string("spec: malformed JSON: ") + e.what());
  }
  return parse_spec(j);
}

/// Comma-separated decimal coordinates.
inline Vector parse_point(const std::string &csv) {
  std::vector<double> xs;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception &) {
      throw InvalidArgument("point: not a number: \"" + item + "\"");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw InvalidArgument("point: not a number: \"" + item + "\"");
    xs.push_back(v);
  }
  if (xs.empty() || (!csv.empty() && csv.back() == ',')) throw InvalidArgument("point: empty coordinate list");
  Vector p(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) p[static_cast<Eigen::Index>(i)] = xs[i];
  return checked(p);
}

inline std::string spec_kind(const BodySpec &s) {
  return std::visit(
      [](const auto &v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NormSpec>) return "norm";
        else if constexpr (std::is_same_v<T, ConeSpec>) return "cone";
        else return "function";
      },
      s);
}

}  // namespace duality::cli
