#pragma once

#include <stdexcept>
#include <string>

namespace replidyn {

/// Raised for violated preconditions and failed numerical procedures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace replidyn
