#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "railplan/milp.hpp"

namespace railtest {

using namespace railplan;

// Forwards to HiGHS and keeps every model and result it saw.
class RecordingBackend : public milp::SolverBackend {
 public:
  std::string name() const override { return "recording"; }
  bool reentrant() const override { return false; }
  milp::SolveResult solve(const milp::ModelSpec& m, const milp::SolverOptions& o) override {
    models.push_back(m);
    options.push_back(o);
    if (failOnCall == static_cast<int>(models.size())) {
      if (throwOnFail) throw std::runtime_error("injected fault");
      milp::SolveResult r;
      r.status = milp::SolveStatus::Error;
      r.message = "injected fault";
      results.push_back(r);
      return r;
    }
    results.push_back(inner->solve(m, o));
    return results.back();
  }

  std::unique_ptr<milp::SolverBackend> inner = milp::makeBackend("highs");
  int failOnCall = 0;  // 1-based; 0 never
  bool throwOnFail = false;
  std::vector<milp::ModelSpec> models;
  std::vector<milp::SolverOptions> options;
  std::vector<milp::SolveResult> results;
};

}  // namespace railtest
