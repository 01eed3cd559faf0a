// Command-line front end: weak membership, dual norms, dual cones, Fenchel
// conjugates and Mahler volumes for bodies described in JSON spec files.
//
// Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.

#include "spec_io.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

using duality::cli::Json;
using OJson = nlohmann::ordered_json;
namespace dl = duality;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string spec_path;
  std::string point_csv;
  double delta = 0.05;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = dl::ToleranceConfig{}.rng_seed;
  int max_iterations = dl::ToleranceConfig{}.max_cut_iterations;
  bool json = false;
};

OJson to_json(const dl::Vector &v) {
  OJson arr = OJson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

dl::Vector point_for(const Options &o, int dim) {
  if (o.point_csv.empty()) throw dl::InvalidArgument("--point is required");
  dl::Vector p = dl::cli::parse_point(o.point_csv);
  if (p.size() != dim)
    throw dl::InvalidArgument("point has dimension " + std::to_string(p.size()) + ", spec has " +
                              std::to_string(dim));
  return p;
}

dl::WmemOracle norm_oracle(const dl::cli::NormSpec &s) {
  auto norm = s.norm;
  return dl::exact_to_weak(
      s.desc.n, [norm](const dl::Vector &x) { return norm.eval(x) <= 1.0; },
      dl::CenteredBody::make(dl::Vector::Zero(s.desc.n), 1.0 / s.desc.k_hi, 1.0 / s.desc.k_lo), "primal");
}

const dl::cli::NormSpec &as_norm(const dl::cli::BodySpec &s) {
  if (const auto *n = std::get_if<dl::cli::NormSpec>(&s)) return *n;
  throw dl::InvalidArgument("not a norm spec");
}

const dl::cli::ConeSpec &as_cone(const dl::cli::BodySpec &s) {
  if (const auto *c = std::get_if<dl::cli::ConeSpec>(&s)) return *c;
  throw dl::InvalidArgument("not a cone spec");
}

const dl::cli::FunctionSpec &as_function(const dl::cli::BodySpec &s) {
  if (const auto *f = std::get_if<dl::cli::FunctionSpec>(&s)) return *f;
  throw dl::InvalidArgument("not a function spec");
}

dl::ToleranceConfig config(const Options &o) {
  if (o.max_iterations < 1) throw dl::InvalidArgument("--max-iterations must be at least 1");
  dl::ToleranceConfig cfg;
  cfg.rng_seed = o.seed;
  cfg.max_cut_iterations = o.max_iterations;
  return cfg;
}

void require_delta(double d, const char *name) {
  if (!(std::isfinite(d) && d > 0.0)) throw dl::InvalidArgument(std::string(name) + " must be positive");
}

OJson cmd_wmem(const Options &o, const dl::cli::BodySpec &spec) {
  require_delta(o.delta, "--delta");
  OJson r;
  if (const auto *n = std::get_if<dl::cli::NormSpec>(&spec)) {
    const dl::WmemOracle oracle = norm_oracle(*n);
    const dl::Vector x = point_for(o, n->desc.n);
    r["inputs"] = {{"body", n->norm.name()}, {"point", to_json(x)}};
    r["result"] = {{"verdict", dl::to_string(oracle.query(x, o.delta))}};
    r["calls"] = {{"primal", oracle.calls()}};
  } else if (const auto *c = std::get_if<dl::cli::ConeSpec>(&spec)) {
    const dl::WmemOracle oracle = c->cone.oracle();
    const dl::Vector x = point_for(o, c->desc.n);
    r["inputs"] = {{"body", c->cone.name()}, {"point", to_json(x)}};
    r["result"] = {{"verdict", dl::to_string(oracle.query(x, o.delta))}};
    r["calls"] = {{"cone", oracle.calls()}};
  } else {
    throw dl::InvalidArgument("not a body spec");
  }
  r["tolerance"] = o.delta;
  return r;
}

OJson cmd_dual_norm(const Options &o, const dl::cli::BodySpec &spec) {
  const auto &n = as_norm(spec);
  require_delta(o.delta, "--delta");
  const dl::Vector y = point_for(o, n.desc.n);
  if (y.norm() == 0.0) throw dl::InvalidArgument("cannot normalize zero vector");
  const dl::WmemOracle primal = norm_oracle(n);
  const auto rep = dl::dual_norm_run(primal, n.desc, y, o.delta, config(o));
  OJson r;
  r["inputs"] = {{"body", n.norm.name()}, {"point", to_json(y)}, {"k", n.desc.k_lo}, {"K", n.desc.k_hi}};
  r["result"] = {{"value", rep.value},
                 {"annulus_factor", rep.scale},
                 {"bisection_delta", rep.bisection_delta},
                 {"bisection_steps", rep.trace.intervals.size()}};
  r["tolerance"] = o.delta;
  r["calls"] = {{"dual", rep.dual_queries}, {"primal", rep.primal_queries}};
  return r;
}

OJson cmd_dual_cone(const Options &o, const dl::cli::BodySpec &spec) {
  const auto &c = as_cone(spec);
  require_delta(o.delta, "--delta");
  const dl::Vector x = point_for(o, c.desc.n);
  const dl::WmemOracle cone = c.cone.oracle();
  const dl::WmemOracle dual = dl::dual_cone_wmem(cone, c.desc, config(o));
  const dl::WeakVerdict v = dual.query(x, o.delta);
  OJson r;
  r["inputs"] = {{"body", c.cone.name()}, {"point", to_json(x)}};
  r["result"] = {{"verdict", dl::to_string(v)}};
  r["tolerance"] = o.delta;
  r["calls"] = {{"dual", dual.calls()}, {"cone", cone.calls()}};
  return r;
}

OJson cmd_fenchel(const Options &o, const dl::cli::BodySpec &spec) {
  const auto &f = as_function(spec);
  require_delta(o.delta, "--eps");
  const dl::Vector y = point_for(o, f.function.dim());
  const dl::FunctionApproxOracle oracle = f.function.oracle();
  const auto rep = dl::fenchel_run(oracle, f.cert, y, o.delta, config(o));
  OJson r;
  r["inputs"] = {{"function", f.function.name()}, {"point", to_json(y)}};
  r["result"] = {{"value", rep.value}, {"truncation_radius", rep.truncation_radius}, {"cap", rep.cap}};
  r["tolerance"] = o.delta;
  r["calls"] = {{"function", rep.function_calls}, {"epigraph", rep.epigraph_queries}};
  return r;
}

OJson cmd_mahler(const Options &o, const dl::cli::BodySpec &spec) {
  const auto &n = as_norm(spec);
  if (o.samples == 0) throw dl::InvalidArgument("--samples must be positive");
  const dl::WmemOracle primal = norm_oracle(n);
  const auto rep = dl::mahler_run(primal, n.desc, o.samples, config(o));
  OJson r;
  r["inputs"] = {{"body", n.norm.name()}, {"samples", o.samples}};
  r["result"] = {{"value", rep.product.mean},
                 {"half_width_95", rep.product.half_width_95},
                 {"primal_volume", rep.primal.mean},
                 {"dual_volume", rep.dual.mean}};
  r["tolerance"] = rep.product.half_width_95;
  r["calls"] = {{"primal", rep.primal_queries}, {"dual", rep.dual_queries}};
  return r;
}

std::string format_scalar(const OJson &v) {
  if (v.is_number_float()) {
    // Shortest representation that round-trips.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return std::string(buf, res.ptr);
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void print_text(const OJson &report) {
  const OJson &res = report.at("result");
  if (res.contains("verdict"))
    std::cout << res.at("verdict").get<std::string>() << '\n';
  else
    std::cout << format_scalar(res.at("value")) << '\n';
  for (const auto &[section, body] : report.items()) {
    if (body.is_object()) {
      for (const auto &[k, v] : body.items()) std::cout << section << '.' << k << ": " << format_scalar(v) << '\n';
    } else {
      std::cout << section << ": " << format_scalar(body) << '\n';
    }
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Oracle-based convex duality toolkit"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App *sub, bool point, bool delta) {
    sub->add_option("--spec", o.spec_path, "JSON spec file")->required();
    if (point) sub->add_option("--point", o.point_csv, "comma-separated coordinates")->required();
    if (delta) sub->add_option("--delta,--eps", o.delta, "weak slack / precision");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--max-iterations", o.max_iterations, "cutting-plane iteration cap");
    auto *json = sub->add_flag("--json", o.json, "JSON report");
    sub->add_flag("--text", "text report (default)")->excludes(json);
  };
  auto *wmem = app.add_subcommand("wmem", "weak membership query");
  add_common(wmem, true, true);
  auto *dual_norm = app.add_subcommand("dual-norm", "dual norm value from the primal ball oracle");
  add_common(dual_norm, true, true);
  auto *dual_cone = app.add_subcommand("dual-cone", "weak membership in the dual cone");
  add_common(dual_cone, true, true);
  auto *fenchel = app.add_subcommand("fenchel", "Fenchel conjugate value");
  add_common(fenchel, true, true);
  auto *mahler = app.add_subcommand("mahler", "Mahler volume estimate");
  add_common(mahler, false, false);
  mahler->add_option("--samples", o.samples, "Monte-Carlo samples per ball");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  std::string command;
  for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);

  const auto start = std::chrono::steady_clock::now();
  try {
    const auto spec = dl::cli::load_spec(o.spec_path);
    OJson body;
    if (wmem->parsed()) body = cmd_wmem(o, spec);
    else if (dual_norm->parsed()) body = cmd_dual_norm(o, spec);
    else if (dual_cone->parsed()) body = cmd_dual_cone(o, spec);
    else if (fenchel->parsed()) body = cmd_fenchel(o, spec);
    else body = cmd_mahler(o, spec);

    OJson report;
    report["command"] = command;
    for (auto &[k, v] : body.items()) report[k] = v;
    report["seed"] = o.seed;
    report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.json)
      std::cout << report.dump(2) << '\n';
    else
      print_text(report);
    return 0;
  } catch (const dl::InvalidArgument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const dl::NumericalFailure &e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Json::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
