#pragma once

#include <stdexcept>
#include <string>

namespace nfr {

// Precondition violated by an argument (shape mismatch, negative input, ...).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Filter asked to run on an image whose dimension it does not handle.
class UnsupportedDimension : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

// File could not be read, parsed or written.
class IoError : public std::runtime_error {
public:
  IoError(const std::string& path, const std::string& reason)
      : std::runtime_error(path + ": " + reason), path_(path) {}

  const std::string& path() const { return path_; }

private:
  std::string path_;
};

}  // namespace nfr
