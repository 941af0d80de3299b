#include "strassen/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace strassen {

namespace {

using Json = nlohmann::ordered_json;

std::string where(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

Json parse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw ValidationError("malformed JSON at " + where(text, at));
  }
}

const Json& field(const Json& j, const char* key, const std::string& ctx) {
  if (!j.is_object()) throw ValidationError(ctx + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(ctx + ": missing field \"" + key + "\"");
  return *it;
}

double number(const Json& j, const std::string& ctx) {
  if (!j.is_number()) throw ValidationError(ctx + ": expected a number");
  return j.get<double>();
}

Json dist_json(const Dist& d) {
  Json j;
  j["labels"] = d.labels();
  j["mass"] = d.mass();
  return j;
}

Dist dist_of(const Json& j, const std::string& ctx) {
  const Json& labels = field(j, "labels", ctx);
  const Json& mass = field(j, "mass", ctx);
  if (!labels.is_array() || !mass.is_array()) throw ValidationError(ctx + ": labels and mass must be arrays");
  std::vector<std::string> l;
  std::vector<double> m;
  for (const auto& v : labels) {
    if (!v.is_string()) throw ValidationError(ctx + ": labels must be strings");
    l.push_back(v.get<std::string>());
  }
  for (const auto& v : mass) m.push_back(number(v, ctx + ".mass"));
  return Dist(std::move(l), std::move(m));
}

Json matrix_json(const Table& t) { return t.to_rows(); }

Table matrix_of(const Json& j, const std::string& ctx) {
  if (!j.is_array()) throw ValidationError(ctx + ": expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw ValidationError(ctx + ": expected an array of rows");
    auto& row = rows.emplace_back();
    for (const auto& v : r) row.push_back(number(v, ctx));
  }
  return Table::from_rows(rows);
}

}  // namespace

std::string dist_to_json(const Dist& d) { return dist_json(d).dump(); }

Dist dist_from_json(std::string_view text) { return dist_of(parse(text), "dist"); }

std::string joint_to_json(const JointDist& jd) {
  Json j;
  j["matrix"] = matrix_json(jd.matrix());
  return j.dump();
}

JointDist joint_from_json(std::string_view text) {
  return JointDist(matrix_of(field(parse(text), "matrix", "joint"), "joint.matrix"));
}

std::string plan_to_json(const TransportPlan& plan) {
  Json j;
  j["matrix"] = matrix_json(plan.plan.matrix());
  j["objective"] = plan.objective;
  return j.dump();
}

std::string instance_to_json(const Instance& inst) {
  Json j;
  j["px"] = dist_json(inst.px);
  j["py"] = dist_json(inst.py);
  j["cost"] = matrix_json(inst.cost.values());
  if (inst.alpha) j["alpha"] = *inst.alpha;
  if (inst.delta) j["delta"] = *inst.delta;
  if (inst.n) j["n"] = *inst.n;
  return j.dump(2);
}

Instance instance_from_json(std::string_view text) {
  const Json j = parse(text);
  Instance inst{dist_of(field(j, "px", "instance"), "px"), dist_of(field(j, "py", "instance"), "py"),
                CostMatrix(matrix_of(field(j, "cost", "instance"), "cost")), {}, {}, {}};
  if (inst.cost.rows() != inst.px.size() || inst.cost.cols() != inst.py.size())
    throw ValidationError("cost shape does not match the marginals");
  if (j.contains("alpha")) inst.alpha = number(j["alpha"], "alpha");
  if (j.contains("delta")) inst.delta = number(j["delta"], "delta");
  if (j.contains("n")) {
    if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1) throw ValidationError("n must be a positive integer");
    inst.n = j["n"].get<int>();
  }
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

}  // namespace strassen
