#pragma once

#include <stdexcept>
#include <string>

namespace possfuse {

// Contract violations: bad arguments, inadmissible operator/method/regime
// combinations, malformed contents of an otherwise readable file.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// The file system said no.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine could not reach its stated accuracy.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace possfuse
