#pragma once

#include <stdexcept>
#include <string>

namespace stripscreen {

// Invalid input data (bad CSV row, malformed config, unreadable image).
// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stripscreen
