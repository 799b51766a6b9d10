#ifndef SAM_LP_FORMAT_HPP
#define SAM_LP_FORMAT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "sam/model.hpp"

namespace sam {

/// Writes the model in CPLEX-style LP format. The output is bit-exact for a
/// given model: names are sanitized to [A-Za-z0-9_] (deduplicated with an
/// _<id> suffix on collision) and coefficients are printed with 17
/// significant digits.
void write_lp(const Model& m, std::ostream& out, const std::string& problem_name = "model");
std::string to_lp_string(const Model& m, const std::string& problem_name = "model");

/// The sanitized variable names used by write_lp, indexed by var id.
std::vector<std::string> lp_var_names(const Model& m);

}  // namespace sam

#endif  // SAM_LP_FORMAT_HPP
