#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "strassen/measures.hpp"
#include "strassen/transport.hpp"

namespace strassen {

/// A problem instance as read from disk.
struct Instance {
  Dist px;
  Dist py;
  CostMatrix cost;
  std::optional<double> alpha;
  std::optional<double> delta;
  std::optional<int> n;

  bool operator==(const Instance&) const = default;
};

// JSON text in, JSON text out. Parse failures raise ValidationError; syntax
// errors carry a "line L, column C" diagnostic.

std::string dist_to_json(const Dist& d);
Dist dist_from_json(std::string_view text);

std::string joint_to_json(const JointDist& j);
JointDist joint_from_json(std::string_view text);

std::string plan_to_json(const TransportPlan& plan);

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(std::string_view text);
Instance load_instance(const std::string& path);

}  // namespace strassen
