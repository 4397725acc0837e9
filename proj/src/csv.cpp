#include "longrun/csv.hpp"

#include <cstdio>

namespace longrun {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_values_csv(std::ostream& out, const std::vector<ValueTable>& tables) {
  out << "family,state,m,n_or_lambda,value\n";
  for (const ValueTable& table : tables) {
    const std::string fam = family_name(table.family);
    const std::string horizon = table.family == Family::vlambda
                                    ? format_double(table.lambda)
                                    : std::to_string(table.n);
    for (size_t z = 0; z < table.values.size(); ++z) {
      out << fam << ',' << z << ',' << table.m << ',' << horizon << ','
          << format_double(table.values[z]) << '\n';
    }
  }
}

}  // namespace longrun
