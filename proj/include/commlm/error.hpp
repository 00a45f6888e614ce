#pragma once

#include <stdexcept>
#include <string>

namespace commlm {

/// Bad flags, bad config keys, or invalid hyperparameters. The CLI maps
/// these to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problems with input data: unreadable files, malformed records, too few
/// samples to satisfy a request. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace commlm
