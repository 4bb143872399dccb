#pragma once

#include <stdexcept>
#include <string>

namespace skelevo {

/// Bad or unreadable input data (files, dimensions, misaligned sequences).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter outside its documented domain.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Lookup of a pixel that is not part of the structure queried.
class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A synthetic growth script that cannot be realized.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace skelevo
