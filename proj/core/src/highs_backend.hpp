#pragma once

#include <memory>

#include "railplan/milp.hpp"

namespace railplan::milp {

std::unique_ptr<SolverBackend> makeHighsBackend();

}  // namespace railplan::milp
