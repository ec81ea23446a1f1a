#pragma once

#include <stdexcept>
#include <string>

namespace lobtree {

/// Invalid user input. `path` names the offending key ("dist.atoms[1]").
class SpecError : public std::invalid_argument {
 public:
  SpecError(std::string path, const std::string& message)
      : std::invalid_argument(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace lobtree
