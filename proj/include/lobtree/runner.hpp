#pragma once

#include <iosfwd>
#include <string>

#include "lobtree/config.hpp"

namespace lobtree {

/// Runs the study and returns its primary output (CSV or JSON text).
std::string execute(const RunConfig& config);

/// Runs the study. With an output path, the result is written through a
/// temporary file and a rename, next to `<out>.meta.json` holding the
/// resolved configuration, its hash, the seed and the software version.
/// Without one, the result goes to `console`.
void run(const RunConfig& config, std::ostream& console);

void write_file_atomically(const std::string& path, const std::string& content);

}  // namespace lobtree
