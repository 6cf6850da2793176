#pragma once

#include <stdexcept>
#include <string>

namespace samplan {

struct SampleFormatError : std::runtime_error {
    explicit SampleFormatError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace samplan
