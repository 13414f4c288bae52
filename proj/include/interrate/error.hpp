#pragma once

#include <stdexcept>
#include <string>

namespace interrate {

// All library failures surface as this type; the message is the stable part
// callers and tests match on ("no data", "unknown entity", ...).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace interrate
