#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace haplodrift::cli {

/// Runs one `haplodrift` invocation. Reports go to `out` unless an output
/// path is given; failures print one JSON error line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace haplodrift::cli
