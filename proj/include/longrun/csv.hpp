#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "longrun/values.hpp"

namespace longrun {

/// 17 significant digits: round-trips every double and is byte-stable
/// across runs.
std::string format_double(double x);

/// Columns: family,state,m,n_or_lambda,value — one row per table entry.
void write_values_csv(std::ostream& out, const std::vector<ValueTable>& tables);

}  // namespace longrun
