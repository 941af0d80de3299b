#include "strassen/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "strassen/clt.hpp"
#include "strassen/finite_n.hpp"
#include "strassen/io.hpp"
#include "strassen/ldp.hpp"
#include "strassen/mdp.hpp"
#include "strassen/transport.hpp"

namespace strassen {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", v);
}

Json json_num(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

/// Column-labeled numeric table, the common shape of every grid command.
struct Frame {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string render(const Frame& f, const std::string& format, const std::string& meta) {
  if (format == "json") {
    Json j;
    j["meta"] = meta;
    j["columns"] = f.columns;
    j["rows"] = Json::array();
    for (const auto& r : f.rows) {
      Json row = Json::array();
      for (double v : r) row.push_back(json_num(v));
      j["rows"].push_back(row);
    }
    return j.dump(2) + "\n";
  }
  std::string s;
  for (std::size_t i = 0; i < f.columns.size(); ++i) s += (i ? "," : "") + f.columns[i];
  s += "\n";
  for (const auto& r : f.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + num(r[i]);
    s += "\n";
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot read a number from '" + s + "' in " + what);
  }
}

int to_int(const std::string& s, const std::string& what) {
  const double v = to_double(s, what);
  if (v != std::floor(v) || v < 1 || v > 1e9) throw ValidationError(what + " needs positive integers");
  return static_cast<int>(v);
}

/// "lo:hi:steps" → steps evenly spaced points including both ends.
std::vector<double> parse_grid(const std::string& spec, const std::string& what) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw ValidationError(what + " must look like lo:hi:steps");
  const double lo = to_double(parts[0], what), hi = to_double(parts[1], what);
  const int steps = to_int(parts[2], what);
  if (!(lo <= hi)) throw ValidationError(what + " needs lo <= hi");
  std::vector<double> out;
  for (int i = 0; i < steps; ++i) out.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
  return out;
}

/// "lo:hi:doubling", "lo:hi:step" or "n1,n2,...".
std::vector<int> parse_n_list(const std::string& spec) {
  std::vector<int> out;
  if (spec.find(':') == std::string::npos) {
    for (const auto& p : split(spec, ',')) out.push_back(to_int(p, "--n"));
    return out;
  }
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw ValidationError("--n must look like lo:hi:doubling or lo:hi:step");
  const int lo = to_int(parts[0], "--n"), hi = to_int(parts[1], "--n");
  if (lo > hi) throw ValidationError("--n needs lo <= hi");
  if (parts[2] == "doubling") {
    for (long v = lo; v <= hi; v *= 2) out.push_back(static_cast<int>(v));
  } else {
    const int step = to_int(parts[2], "--n");
    for (long v = lo; v <= hi; v += step) out.push_back(static_cast<int>(v));
  }
  return out;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError("cannot write " + path);
  file << text;
}

/// Bern(a), Bern(b) with 0/1 cost, ordered so that a ≤ b; nullopt otherwise.
std::optional<std::pair<double, double>> binary_hamming(const Instance& inst) {
  if (inst.px.size() != 2 || inst.py.size() != 2) return std::nullopt;
  if (!(inst.cost == CostMatrix::hamming(2))) return std::nullopt;
  const double a = inst.px[0], b = inst.py[0];
  return std::make_pair(std::min(a, b), std::max(a, b));
}

struct Args {
  std::string instance, out, format = "csv";
  std::optional<double> alpha, delta;
  std::string n_spec;
  std::string grid;
  std::string tail = "both";
  std::string mode = "lower";
  bool oracle = false;
  std::optional<std::uint64_t> seed;
  int count = 1;
  double a = 0.0, b = 0.0;
};

double need_alpha(const Args& args, const Instance& inst) {
  if (args.alpha) return *args.alpha;
  if (inst.alpha) return *inst.alpha;
  throw ValidationError("alpha is required (flag --alpha or instance field)");
}

int need_n(const Args& args, const Instance& inst) {
  if (!args.n_spec.empty()) return to_int(args.n_spec, "--n");
  if (inst.n) return *inst.n;
  throw ValidationError("n is required (flag --n or instance field)");
}

std::string cmd_ot(const Args& args) {
  const Instance inst = load_instance(args.instance);
  const TransportPlan plan = ot_cost(inst.px, inst.py, inst.cost);
  if (args.format == "json") return plan_to_json(plan) + "\n";
  const auto cert = kantorovich_certificate(inst.px, inst.py, inst.cost, plan);
  return render({{"objective", "duality_gap"}, {{plan.objective, cert.gap}}}, "csv", "");
}

std::string cmd_ecp(const Args& args) {
  const Instance inst = load_instance(args.instance);
  const double alpha = need_alpha(args, inst);
  const EcpSolution sol = ecp(inst.px, inst.py, inst.cost, alpha);
  std::optional<DualWitness> dual;
  if (args.oracle) dual = ecp_dual_bruteforce(inst.px, inst.py, inst.cost, alpha);
  if (args.format == "json") {
    Json j;
    j["alpha"] = alpha;
    j["G"] = sol.value;
    if (dual) j["G_dual"] = dual->value;
    j["plan"] = sol.plan.to_rows();
    j["witness"] = sol.witness;
    return j.dump(2) + "\n";
  }
  Frame f{{"alpha", "G"}, {{alpha, sol.value}}};
  if (dual) {
    f.columns.push_back("G_dual");
    f.rows[0].push_back(dual->value);
  }
  return render(f, "csv", "");
}

std::string cmd_exact_gn(const Args& args) {
  const Instance inst = load_instance(args.instance);
  const double alpha = need_alpha(args, inst);
  const int n = need_n(args, inst);
  const GnValue g = exact_gn_full(inst.px, inst.py, inst.cost, alpha, n);
  Frame f{{"n", "alpha", "G", "complement"}, {{double(n), alpha, g.value, g.complement}}};
  if (args.oracle) {
    f.columns.push_back("G_direct");
    f.rows[0].push_back(direct_gn_oracle(inst.px, inst.py, inst.cost, alpha, n));
  }
  return render(f, args.format, "exact-gn");
}

std::string cmd_ldp(const Args& args) {
  const Instance inst = load_instance(args.instance);
  if (args.grid.empty()) throw ValidationError("--alpha-grid is required");
  if (args.tail != "lower" && args.tail != "upper" && args.tail != "both")
    throw ValidationError("--tail must be lower, upper or both");
  const auto grid = parse_grid(args.grid, "--alpha-grid");
  const bool lower = args.tail != "upper", upper = args.tail != "lower";
  const auto bin = binary_hamming(inst);
  if (args.oracle && !bin) throw ValidationError("--oracle needs a binary instance with 0/1 cost");

  Frame f{{"alpha"}, {}};
  if (lower) f.columns.push_back("f");
  if (upper) f.columns.push_back("g");
  if (args.oracle && lower) f.columns.push_back("f_binary");
  if (args.oracle && upper) f.columns.push_back("g_binary");
  for (double alpha : grid) {
    const RateQuery q{inst.px, inst.py, inst.cost, alpha};
    std::vector<double> row{alpha};
    if (lower) row.push_back(rate_f(q));
    if (upper) row.push_back(rate_g(q));
    if (args.oracle && lower) row.push_back(rate_f_binary(bin->first, bin->second, alpha));
    if (args.oracle && upper) row.push_back(rate_g_binary(bin->first, bin->second, alpha));
    f.rows.push_back(std::move(row));
  }
  return render(f, args.format, "ldp-rate");
}

std::string cmd_mdp(const Args& args) {
  const Instance inst = load_instance(args.instance);
  if (args.grid.empty()) throw ValidationError("--delta-grid is required");
  Frame f{{"delta", "rate"}, {}};
  for (double d : parse_grid(args.grid, "--delta-grid")) {
    double r = 0.0;
    if (d < 0.0) r = mdp_rate_lower(inst.px, inst.py, inst.cost, d);
    if (d > 0.0) r = mdp_rate_upper(inst.px, inst.py, inst.cost, d);
    f.rows.push_back({d, r});
  }
  return render(f, args.format, "mdp-rate");
}

std::string cmd_clt(const Args& args) {
  if (args.grid.empty()) throw ValidationError("--delta-grid is required");
  Frame f{{"delta", "lambda"}, {}};
  if (args.oracle) f.columns.push_back("lambda_grid");
  for (double d : parse_grid(args.grid, "--delta-grid")) {
    std::vector<double> row{d, lambda_binary(args.a, args.b, d)};
    if (args.oracle) row.push_back(lambda_dual_grid(args.a, args.b, d));
    f.rows.push_back(std::move(row));
  }
  return render(f, args.format, fmt::format("clt a={} b={}", num(args.a), num(args.b)));
}

std::string cmd_converge(const Args& args) {
  const Instance inst = load_instance(args.instance);
  if (args.n_spec.empty()) throw ValidationError("--n is required");
  if (args.mode != "lower" && args.mode != "upper") throw ValidationError("--mode must be lower or upper");
  const auto ns = parse_n_list(args.n_spec);
  std::function<double(int)> alpha_fn;
  const auto delta = args.delta ? args.delta : args.alpha ? std::nullopt : inst.delta;
  if (delta) {
    // Central-limit scaling around the population cost.
    const double e = ot_cost(inst.px, inst.py, inst.cost).objective, d = *delta;
    alpha_fn = [e, d](int n) { return e + d / std::sqrt(static_cast<double>(n)); };
  } else {
    const double alpha = need_alpha(args, inst);
    alpha_fn = [alpha](int) { return alpha; };
  }
  const auto rows =
      exponent_series(inst.px, inst.py, inst.cost, alpha_fn, ns, args.mode == "lower" ? Tail::lower : Tail::upper);
  Frame f{{"n", "alpha_n", "G", "exponent"}, {}};
  for (const auto& r : rows) f.rows.push_back({double(r.n), r.alpha, r.g, r.exponent});
  return render(f, args.format, "converge " + args.mode);
}

std::string cmd_sample(const Args& args) {
  const Instance inst = load_instance(args.instance);
  if (!args.seed) throw ValidationError("sample requires an explicit --seed");
  if (args.count < 1) throw ValidationError("--count must be positive");
  const double alpha = need_alpha(args, inst);
  const NestedInstance nested(inst.px, inst.py, inst.cost, need_n(args, inst));
  const auto mu = nested.mu().mass(), nu = nested.nu().mass();
  const EcpSolution outer = ecp_masses(mu, nu, nested.inner_cost(), alpha);
  const LiftedCoupling lift(outer.plan, nested);
  std::mt19937_64 rng(*args.seed);

  Json draws = Json::array();
  std::string csv = "draw,t,x,y\n";
  for (int k = 0; k < args.count; ++k) {
    const auto d = lift.sample(rng);
    draws.push_back(Json{{"x", d.x}, {"y", d.y}});
    for (std::size_t t = 0; t < d.x.size(); ++t) csv += fmt::format("{},{},{},{}\n", k, t, d.x[t], d.y[t]);
  }
  if (args.format == "csv") return csv;
  Json j;
  j["seed"] = *args.seed;
  j["alpha"] = alpha;
  j["draws"] = std::move(draws);
  return j.dump(2) + "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strassen lab: exact and asymptotic excess-cost probabilities", "strassen-lab"};
  app.require_subcommand(1);
  Args args;
  std::function<std::string(const Args&)> action;

  auto common = [&](CLI::App* sub, bool needs_instance) {
    if (needs_instance) sub->add_option("--instance", args.instance, "instance JSON file")->required();
    sub->add_option("--out", args.out, "output file (default: stdout)");
    sub->add_option("--format", args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto bind = [&](CLI::App* sub, std::string (*fn)(const Args&)) { sub->callback([&action, fn] { action = fn; }); };

  auto* ot = app.add_subcommand("ot", "optimal transport cost and plan");
  common(ot, true);
  bind(ot, cmd_ot);

  auto* ec = app.add_subcommand("ecp", "optimal excess-cost probability at one alpha");
  common(ec, true);
  ec->add_option("--alpha", args.alpha);
  ec->add_flag("--oracle", args.oracle, "cross-check against subset enumeration");
  bind(ec, cmd_ecp);

  auto* gn = app.add_subcommand("exact-gn", "exact G for n-fold products");
  common(gn, true);
  gn->add_option("--alpha", args.alpha);
  gn->add_option("--n", args.n_spec);
  gn->add_flag("--oracle", args.oracle, "cross-check on the full product space");
  bind(gn, cmd_exact_gn);

  auto* ld = app.add_subcommand("ldp-rate", "large-deviation rate functions");
  common(ld, true);
  ld->add_option("--alpha-grid", args.grid)->required();
  ld->add_option("--tail", args.tail, "lower, upper or both");
  ld->add_flag("--oracle", args.oracle, "add binary closed forms");
  bind(ld, cmd_ldp);

  auto* md = app.add_subcommand("mdp-rate", "moderate-deviation rates");
  common(md, true);
  md->add_option("--delta-grid", args.grid)->required();
  bind(md, cmd_mdp);

  auto* cl = app.add_subcommand("clt", "binary Gaussian limit of the excess-cost probability");
  common(cl, false);
  cl->add_option("--a", args.a)->required();
  cl->add_option("--b", args.b)->required();
  cl->add_option("--delta-grid", args.grid)->required();
  cl->add_flag("--oracle", args.oracle, "add the dual grid search");
  bind(cl, cmd_clt);

  auto* cv = app.add_subcommand("converge", "finite-n exponents along a sequence of n");
  common(cv, true);
  cv->add_option("--mode", args.mode, "lower or upper");
  cv->add_option("--alpha", args.alpha);
  cv->add_option("--delta", args.delta, "use alpha_n = E + delta/sqrt(n)");
  cv->add_option("--n", args.n_spec, "lo:hi:doubling, lo:hi:step or a comma list")->required();
  bind(cv, cmd_converge);

  auto* sm = app.add_subcommand("sample", "draw sequence pairs from the lifted optimal coupling");
  common(sm, true);
  sm->add_option("--alpha", args.alpha);
  sm->add_option("--n", args.n_spec);
  sm->add_option("--seed", args.seed, "random seed (required)");
  sm->add_option("--count", args.count);
  bind(sm, cmd_sample);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    emit(action(args), args.out, out);
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SizeGuardError& e) {
    err << "refused: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace strassen
