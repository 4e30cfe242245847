#pragma once

#include <stdexcept>
#include <string>

namespace driftscan {

// Single error type for parse failures and contract violations surfaced by
// the library. The message is the whole interface.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace driftscan
