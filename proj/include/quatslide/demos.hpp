#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace quatslide {

/// A built-in scenario set. Most demos are a single run; "unwinding" pairs
/// the sgn-based controller with the naive baseline.
struct Demo {
  struct Run {
    std::string label;  // output subdirectory; empty for single-run demos
    std::string scenario_json;
  };
  std::string name;
  std::string description;
  std::vector<Run> runs;
};

const std::vector<Demo>& builtin_demos();
const Demo* find_demo(std::string_view name);

}  // namespace quatslide
